//! Command implementations behind the `gfcsim` binary.
//!
//! Exit-code contract: 0 success (and, for `simulate`, a stable run),
//! 1 usage or runtime error, 2 loss of synchronism (`simulate`) or a
//! verdict mismatch (`reproduce-paper`). Output files are written
//! atomically (temp file plus rename) so partially written CSVs never
//! appear under concurrent runs.

use crate::analysis::{margin_report, Bound, Cct, MarginReport, MarginScenario};
use crate::config::ScenarioConfig;
use crate::electrical::sweep_curves;
use crate::error::Result;
use crate::scenario::{build_signal, Event};
use crate::simulator::{run, SimConfig, Trajectory, Verdict};
use crate::types::FeedbackMode;
use std::path::{Path, PathBuf};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "GFCSIM_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNSTABLE: i32 = 2;

/// Default output directory: `$GFCSIM_OUT_DIR` or the current directory.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn load_config(path: &Path, overrides: &[String]) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    for o in overrides {
        cfg.apply_override(o)?;
    }
    Ok(cfg)
}

/// Write `content` to `path` via a temp file in the same directory.
pub fn atomic_write(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Trajectory CSV: one row per recorded sample.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::with_capacity(traj.len() * 96);
    s.push_str("t_s,delta_deg,omega_vsc_pu,omega_g_pu,p_pcc_pu,q_pcc_pu,p_virt_pu,i_mag_pu,kc_lim,vg_pu,limited\n");
    for i in 0..traj.len() {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            traj.t[i],
            traj.delta[i].to_degrees(),
            traj.omega_vsc_pu[i],
            traj.omega_g_pu[i],
            traj.p_pcc[i],
            traj.q_pcc[i],
            traj.p_virt[i],
            traj.i_mag[i],
            traj.kc_lim[i],
            traj.vg[i],
            traj.limited[i] as u8,
        ));
    }
    s
}

/// Power-angle curve CSV: one row per sampled angle.
pub fn curve_csv(curve: &crate::electrical::PowerAngleCurve) -> String {
    let mut s = String::with_capacity(curve.deltas.len() * 64);
    s.push_str("delta_deg,p_unlimited_pu,p_limited_pu,p_virtual_pu\n");
    for i in 0..curve.deltas.len() {
        s.push_str(&format!(
            "{},{},{},{}\n",
            curve.deltas[i].to_degrees(),
            curve.p_unlimited[i],
            curve.p_limited[i],
            curve.p_virtual[i],
        ));
    }
    s
}

fn bound_fields(b: Bound) -> (f64, &'static str) {
    match b {
        Bound::Exact(v) => (v, "exact"),
        Bound::AtLeast(v) => (v, "at_least"),
    }
}

fn cct_fields(c: Cct) -> (f64, &'static str) {
    match c {
        Cct::Finite(v) => (v, "exact"),
        Cct::AtLeast(v) => (v, "at_least"),
        Cct::UnstableAtZero => (0.0, "no_recovery"),
    }
}

/// Margin CSV: one row per mode and margin quantity.
pub fn margins_csv(reports: &[MarginReport]) -> String {
    let mut s = String::from("mode,quantity,value,qualifier\n");
    for r in reports {
        let mode = r.mode.label();
        s.push_str(&format!(
            "{mode},phase_jump_margin_static_deg,{},exact\n",
            r.phase_margin_static.to_degrees()
        ));
        let (v, q) = bound_fields(r.phase_margin_dynamic);
        s.push_str(&format!(
            "{mode},phase_jump_margin_dynamic_deg,{},{q}\n",
            v.to_degrees()
        ));
        s.push_str(&format!(
            "{mode},rocof_max_static_hz_per_s,{},exact\n",
            r.rocof_static
        ));
        let (v, q) = bound_fields(r.rocof_dynamic);
        s.push_str(&format!("{mode},rocof_max_dynamic_hz_per_s,{v},{q}\n"));
        let (v, q) = cct_fields(r.cct);
        s.push_str(&format!("{mode},cct_s,{v},{q}\n"));
        s.push_str(&format!(
            "{mode},eac_accelerating_area_pu_rad,{},exact\n",
            r.eac.accelerating
        ));
        s.push_str(&format!(
            "{mode},eac_decelerating_area_pu_rad,{},exact\n",
            r.eac.decelerating
        ));
    }
    s
}

/// Human-readable margin table.
pub fn margins_table(reports: &[MarginReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&format!(
            "feedback = {}  (p_set = {} pu)\n",
            r.mode.label(),
            r.p_set
        ));
        s.push_str(&format!(
            "  phase-jump margin : static {:7.2} deg | dynamic {}\n",
            r.phase_margin_static.to_degrees(),
            match r.phase_margin_dynamic {
                Bound::Exact(v) => format!("{:7.2} deg", v.to_degrees()),
                Bound::AtLeast(v) => format!(">= {:6.2} deg", v.to_degrees()),
            }
        ));
        s.push_str(&format!(
            "  max ramp rate     : static {:7.3} Hz/s | dynamic {}\n",
            r.rocof_static,
            match r.rocof_dynamic {
                Bound::Exact(v) => format!("{v:7.3} Hz/s"),
                Bound::AtLeast(v) => format!(">= {v:6.3} Hz/s"),
            }
        ));
        s.push_str(&format!("  critical clearing : {}\n", r.cct));
        s.push_str(&format!(
            "  equal-area (dip)  : accelerating {:.4} pu*rad vs decelerating {:.4} pu*rad -> {}\n",
            r.eac.accelerating,
            r.eac.decelerating,
            if r.eac.stable { "stable" } else { "unstable" }
        ));
    }
    s
}

fn run_config(cfg: &ScenarioConfig) -> Result<Trajectory> {
    let signal = build_signal(&cfg.events, cfg.f_nominal_hz, cfg.network.vg_nominal)?;
    let sim = SimConfig {
        t_end: cfg.sim.t_end_s,
        dt: cfg.sim.dt_s,
        record_every: cfg.sim.record_every,
        los_threshold: std::f64::consts::PI,
        mode: cfg.gfc.feedback_mode,
    };
    run(&signal, &cfg.gfc, &cfg.network, &sim)
}

/// `simulate`: run one scenario, write the trajectory CSV, and encode the
/// verdict in the exit code.
pub fn cmd_simulate(config_path: &Path, out_path: &Path, overrides: &[String]) -> i32 {
    let result = (|| -> Result<Verdict> {
        let cfg = load_config(config_path, overrides)?;
        let traj = run_config(&cfg)?;
        atomic_write(out_path, &trajectory_csv(&traj))?;
        Ok(traj.verdict)
    })();
    match result {
        Ok(Verdict::Stable) => {
            println!("stable; trajectory written to {}", out_path.display());
            EXIT_OK
        }
        Ok(Verdict::LossOfSync { t_los }) => {
            println!(
                "loss of synchronism at t = {t_los:.3} s; trajectory written to {}",
                out_path.display()
            );
            EXIT_UNSTABLE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

/// `curve`: sweep the power-angle curves at the configured grid voltage.
pub fn cmd_curve(config_path: &Path, out_path: &Path, overrides: &[String]) -> i32 {
    let result = (|| -> Result<()> {
        let cfg = load_config(config_path, overrides)?;
        let curve = sweep_curves(&cfg.gfc, &cfg.network, cfg.network.vg_nominal, 721);
        atomic_write(out_path, &curve_csv(&curve))?;
        Ok(())
    })();
    match result {
        Ok(()) => {
            println!("curves written to {}", out_path.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

/// `margin`: compute the margin report for both feedback modes; print the
/// table and optionally write the CSV.
pub fn cmd_margin(config_path: &Path, out_path: Option<&Path>, overrides: &[String]) -> i32 {
    let result = (|| -> Result<Vec<MarginReport>> {
        let cfg = load_config(config_path, overrides)?;
        let scenario = MarginScenario::default();
        FeedbackMode::BOTH
            .iter()
            .map(|&mode| margin_report(&cfg.gfc, &cfg.network, cfg.f_nominal_hz, mode, &scenario))
            .collect()
    })();
    match result {
        Ok(reports) => {
            print!("{}", margins_table(&reports));
            if let Some(path) = out_path {
                if let Err(e) = atomic_write(path, &margins_csv(&reports)) {
                    eprintln!("error: {e}");
                    return EXIT_ERROR;
                }
                println!("margin CSV written to {}", path.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

/// One canned scenario of the reproduction suite.
struct CannedCase {
    name: &'static str,
    p_set: f64,
    event: Event,
    expect_stable: fn(FeedbackMode) -> bool,
}

fn canned_cases() -> [CannedCase; 3] {
    // measured-power feedback loses synchronism in all three events;
    // virtual-power feedback rides every one of them through
    let measured_fails = |mode: FeedbackMode| mode == FeedbackMode::VirtualPower;
    [
        CannedCase {
            name: "rocof_1hz_per_s",
            p_set: 0.8,
            event: Event::RocofRamp {
                t_start: 1.0,
                rate_hz_per_s: -1.0,
                f_end_hz: 48.0,
            },
            expect_stable: measured_fails,
        },
        CannedCase {
            name: "phase_jump_40deg",
            p_set: 0.9,
            event: Event::PhaseJump {
                t: 1.0,
                delta_theta: 40f64.to_radians(),
            },
            expect_stable: measured_fails,
        },
        CannedCase {
            name: "voltage_dip_0.5pu_0.3s",
            p_set: 0.8,
            event: Event::VoltageDip {
                t_start: 1.0,
                duration_s: 0.3,
                v_dip: 0.5,
            },
            expect_stable: measured_fails,
        },
    ]
}

/// `reproduce-paper`: run the canned six-scenario suite (three grid events
/// by two feedback modes), write all trajectories, both curve families,
/// the margin table, and a verdict summary. Exit 0 only if all six
/// verdicts match the expected matrix.
pub fn cmd_reproduce_paper(out_dir: &Path) -> i32 {
    match reproduce_paper(out_dir) {
        Ok(mismatches) if mismatches.is_empty() => {
            println!("6/6 verdicts match; outputs in {}", out_dir.display());
            EXIT_OK
        }
        Ok(mismatches) => {
            for m in &mismatches {
                eprintln!("verdict mismatch: {m}");
            }
            eprintln!("{}/6 verdicts match", 6 - mismatches.len());
            EXIT_UNSTABLE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

/// (case name, mode, expected-stable, verdict, trajectory CSV)
type CaseOutcome = (String, FeedbackMode, bool, Verdict, String);

fn reproduce_paper(out_dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(out_dir)?;
    let cfg = ScenarioConfig::default();
    let cases = canned_cases();

    // the six runs are independent; fan them out over worker threads
    let mut results: Vec<Option<Result<CaseOutcome>>> = (0..6).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for case in &cases {
            for mode in FeedbackMode::BOTH {
                let cfg = &cfg;
                handles.push(scope.spawn(move || -> Result<_> {
                    let mut gfc = cfg.gfc;
                    gfc.p_set = case.p_set;
                    gfc.feedback_mode = mode;
                    let signal =
                        build_signal(&[case.event], cfg.f_nominal_hz, cfg.network.vg_nominal)?;
                    let mut sim = SimConfig::new(mode);
                    sim.t_end = 10.0;
                    let traj = run(&signal, &gfc, &cfg.network, &sim)?;
                    Ok((
                        case.name.to_string(),
                        mode,
                        (case.expect_stable)(mode),
                        traj.verdict,
                        trajectory_csv(&traj),
                    ))
                }));
            }
        }
        for (i, h) in handles.into_iter().enumerate() {
            results[i] = Some(h.join().expect("worker panicked"));
        }
    });

    let mut verdict_rows = String::from("event,mode,expected,actual,match\n");
    let mut mismatches = Vec::new();
    for r in results.into_iter().flatten() {
        let (name, mode, expect_stable, verdict, csv) = r?;
        atomic_write(&out_dir.join(format!("{name}_{}.csv", mode.label())), &csv)?;
        let actual_stable = verdict.is_stable();
        let ok = actual_stable == expect_stable;
        let fmt = |s: bool| if s { "stable" } else { "loss_of_sync" };
        verdict_rows.push_str(&format!(
            "{name},{},{},{},{}\n",
            mode.label(),
            fmt(expect_stable),
            fmt(actual_stable),
            ok as u8
        ));
        if !ok {
            mismatches.push(format!(
                "{name} [{}]: expected {}, got {}",
                mode.label(),
                fmt(expect_stable),
                fmt(actual_stable)
            ));
        }
    }
    atomic_write(&out_dir.join("verdicts.csv"), &verdict_rows)?;
    print!("{verdict_rows}");

    // curve families at nominal and dipped grid voltage
    for (vg, name) in [(1.0, "curves_vg100.csv"), (0.5, "curves_vg050.csv")] {
        let curve = sweep_curves(&cfg.gfc, &cfg.network, vg, 721);
        atomic_write(&out_dir.join(name), &curve_csv(&curve))?;
    }

    // margin table at the default setpoint
    let scenario = MarginScenario::default();
    let reports: Vec<MarginReport> = FeedbackMode::BOTH
        .iter()
        .map(|&mode| margin_report(&cfg.gfc, &cfg.network, cfg.f_nominal_hz, mode, &scenario))
        .collect::<Result<_>>()?;
    atomic_write(&out_dir.join("margins.csv"), &margins_csv(&reports))?;
    print!("{}", margins_table(&reports));

    Ok(mismatches)
}
