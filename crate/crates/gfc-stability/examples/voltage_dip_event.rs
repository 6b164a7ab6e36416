//! Infinite-bus voltage dip to 0.5 pu for 0.3 s at a 0.8 pu setpoint,
//! plus the critical clearing time for both feedback modes. Under the
//! current limit the fault-on curve cannot carry the setpoint at any
//! angle, so measured-power feedback accelerates for the whole dip; the
//! virtual-power curve still crosses the setpoint and finds a fault-on
//! equilibrium instead.
//!
//! ```bash
//! cargo run --example voltage_dip_event
//! ```

use gfc_stability::analysis::critical_clearing_time;
use gfc_stability::defaults;
use gfc_stability::electrical::CurveEvaluator;
use gfc_stability::scenario::{build_signal, Event};
use gfc_stability::simulator::{run, SimConfig};
use gfc_stability::types::FeedbackMode;

fn main() {
    let mut gfc = defaults::gfc_params();
    gfc.p_set = 0.8;
    let net = defaults::network_params();
    let v_dip = 0.5;

    let fault = CurveEvaluator::with_vg(&gfc, &net, v_dip);
    let (_, p_max_meas) = fault.peak(FeedbackMode::MeasuredPower);
    let (_, p_max_virt) = fault.peak(FeedbackMode::VirtualPower);
    println!("fault-on curve maximum  : measured {p_max_meas:.3} pu, virtual {p_max_virt:.3} pu");
    println!("setpoint                : {:.3} pu\n", gfc.p_set);

    let signal = build_signal(
        &[Event::VoltageDip {
            t_start: 1.0,
            duration_s: 0.3,
            v_dip,
        }],
        defaults::F_NOMINAL_HZ,
        net.vg_nominal,
    )
    .unwrap();

    for mode in FeedbackMode::BOTH {
        let mut g = gfc;
        g.feedback_mode = mode;
        let mut sim = SimConfig::new(mode);
        sim.t_end = 10.0;
        let traj = run(&signal, &g, &net, &sim).unwrap();
        let peak = traj.delta.iter().cloned().fold(f64::MIN, f64::max);
        let cct =
            critical_clearing_time(g.p_set, v_dip, &g, &net, defaults::F_NOMINAL_HZ, mode, 2.0)
                .unwrap();
        println!(
            "{:8}: 0.3 s dip -> {}; peak angle {:.1} deg; critical clearing time {}",
            mode.label(),
            traj.verdict,
            peak.to_degrees(),
            cct
        );
    }
}
