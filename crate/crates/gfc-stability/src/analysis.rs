//! Stability-margin computation: equilibria of the composite power-angle
//! curve, maximum phase jump, maximum sustainable rate of change of
//! frequency, critical clearing time, and equal-area diagnostics.
//!
//! Every margin is reported two ways where the underlying question allows
//! it: a *static* value from curve geometry alone, and a *dynamic* value
//! from bisection over full simulations. The static phase-jump margin is
//! the angular distance between the stable and unstable equilibria, which
//! is independent of inertia and damping; the dynamic margin is smaller
//! for underdamped tuning because the rotor swings through the
//! accelerating area while catching up with the shifted grid.

use crate::electrical::CurveEvaluator;
use crate::error::{Error, Result};
use crate::scenario::{build_signal, Event};
use crate::simulator::{run, SimConfig};
use crate::types::{FeedbackMode, GfcParams, NetworkParams};

/// A margin value that may only be known as a lower bound (the probe
/// horizon ran out before finding instability).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Exact(f64),
    AtLeast(f64),
}

impl Bound {
    pub fn value(&self) -> f64 {
        match *self {
            Bound::Exact(v) | Bound::AtLeast(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Bound::Exact(_))
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::Exact(v) => write!(f, "{v:.4}"),
            Bound::AtLeast(v) => write!(f, ">={v:.4}"),
        }
    }
}

/// Critical clearing time outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cct {
    /// Longest surviving dip duration, s (to the stated resolution).
    Finite(f64),
    /// Every probed duration up to this horizon survived.
    AtLeast(f64),
    /// The system cannot recover even from a vanishing dip duration.
    UnstableAtZero,
}

impl Cct {
    /// True when the clearing time is known to exceed `duration`.
    pub fn exceeds(&self, duration: f64) -> bool {
        match *self {
            Cct::Finite(v) | Cct::AtLeast(v) => v > duration,
            Cct::UnstableAtZero => false,
        }
    }

    /// True when the clearing time is known to be below `duration`.
    pub fn below(&self, duration: f64) -> bool {
        match *self {
            Cct::Finite(v) => v < duration,
            Cct::AtLeast(_) => false,
            Cct::UnstableAtZero => true,
        }
    }
}

impl std::fmt::Display for Cct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cct::Finite(v) => write!(f, "{v:.3}"),
            Cct::AtLeast(v) => write!(f, ">={v:.3}"),
            Cct::UnstableAtZero => write!(f, "0.000 (no recovery)"),
        }
    }
}

/// Equal-area verdict for one fault/clearing configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EacAreas {
    /// Area gained while accelerating under the fault curve, pu*rad.
    pub accelerating: f64,
    /// Area available for deceleration under the post curve, pu*rad.
    pub decelerating: f64,
    /// `decelerating >= accelerating`.
    pub stable: bool,
}

/// Deceleration power demanded from the virtual rotor by a frequency ramp:
/// `2*H/f_n * |rocof|` in pu.
pub fn deceleration_power(h: f64, f_nominal: f64, rocof_hz_per_s: f64) -> f64 {
    2.0 * h / f_nominal * rocof_hz_per_s.abs()
}

/// Extra steady power demanded by the frequency droop at a settled
/// per-unit frequency deviation (positive for under-frequency).
pub fn droop_power(delta_omega_pu: f64, r_droop: f64) -> f64 {
    if r_droop == 0.0 {
        0.0
    } else {
        -delta_omega_pu / r_droop
    }
}

/// Stable and unstable equilibria of the mode's composite feedback curve.
/// The unstable crossing sits on the falling branch; for a zero setpoint
/// it degenerates to pi.
pub fn find_equilibria(
    p_set: f64,
    ev: &CurveEvaluator,
    mode: FeedbackMode,
) -> Result<(f64, Option<f64>)> {
    let sign = if p_set < 0.0 { -1.0 } else { 1.0 };
    let target = p_set.abs();
    let stable = ev.rising_crossing(mode, target)?;
    let unstable = ev.falling_crossing(mode, target)?;
    Ok((sign * stable, Some(sign * unstable)))
}

/// Maximum phase-jump margin for the given setpoint.
///
/// Static path: the angular room between the stable and the unstable
/// equilibrium of the composite curve. Dynamic path: bisection on the
/// jump size over full simulations (grid phase advancing, the direction
/// that makes the rotor wind up while catching up), to 0.1 degree.
pub fn max_phase_jump(
    p_set: f64,
    gfc: &GfcParams,
    net: &NetworkParams,
    f_nominal: f64,
    mode: FeedbackMode,
    use_simulation: bool,
) -> Result<Bound> {
    let ev = CurveEvaluator::from_params(gfc, net);
    let (d_stable, d_unstable) = find_equilibria(p_set, &ev, mode)?;
    let static_margin = d_unstable.unwrap() - d_stable;
    if !use_simulation {
        return Ok(Bound::Exact(static_margin));
    }

    let mut gfc = *gfc;
    gfc.p_set = p_set;
    let probe = |jump: f64| -> Result<bool> {
        let sig = build_signal(
            &[Event::PhaseJump {
                t: 1.0,
                delta_theta: jump,
            }],
            f_nominal,
            net.vg_nominal,
        )?;
        let mut sim = SimConfig::new(mode);
        sim.t_end = 13.0;
        Ok(run(&sig, &gfc, net, &sim)?.verdict.is_stable())
    };

    let resolution = 0.1f64.to_radians();
    let mut lo = 0.0;
    let mut hi = std::f64::consts::PI - 1e-3;
    if probe(hi)? {
        return Ok(Bound::AtLeast(hi));
    }
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if probe(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bound::Exact(lo))
}

/// Largest sustainable rate of change of frequency for a ramp from the
/// nominal frequency to `f_end_hz`. Returns `(static, dynamic)` in Hz/s;
/// the static value solves the deceleration-power budget against the
/// composite-curve maximum (with the droop term evaluated at the settled
/// end-frequency deviation), the dynamic one bisects simulated ramps to
/// 0.01 Hz/s.
pub fn max_rocof(
    p_set: f64,
    gfc: &GfcParams,
    net: &NetworkParams,
    f_nominal: f64,
    mode: FeedbackMode,
    f_end_hz: f64,
    use_simulation: bool,
) -> Result<(f64, Bound)> {
    let ev = CurveEvaluator::from_params(gfc, net);
    let (_, p_peak) = ev.peak(mode);
    if p_set > p_peak {
        return Err(Error::InfeasibleSetpoint {
            p_set,
            p_max: p_peak,
        });
    }
    let d_omega_end = (f_end_hz - f_nominal) / f_nominal;
    let headroom = p_peak - p_set - droop_power(d_omega_end, gfc.r_droop);
    let static_max = (headroom * f_nominal / (2.0 * gfc.h_inertia)).max(0.0);
    if !use_simulation {
        return Ok((static_max, Bound::AtLeast(0.0)));
    }

    let mut gfc_probe = *gfc;
    gfc_probe.p_set = p_set;
    let df = (f_nominal - f_end_hz).abs();
    let probe = |rate: f64| -> Result<bool> {
        let sig = build_signal(
            &[Event::RocofRamp {
                t_start: 1.0,
                rate_hz_per_s: rate,
                f_end_hz,
            }],
            f_nominal,
            net.vg_nominal,
        )?;
        let mut sim = SimConfig::new(mode);
        sim.t_end = 1.0 + df / rate + 8.0;
        Ok(run(&sig, &gfc_probe, net, &sim)?.verdict.is_stable())
    };

    const RATE_CAP: f64 = 20.0;
    let resolution = 0.01;
    let mut lo = 0.05;
    if !probe(lo)? {
        return Ok((static_max, Bound::Exact(0.0)));
    }
    let mut hi = (1.5 * static_max).max(0.2);
    loop {
        if hi >= RATE_CAP {
            return Ok((static_max, Bound::AtLeast(RATE_CAP)));
        }
        if !probe(hi)? {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(RATE_CAP);
    }
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if probe(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((static_max, Bound::Exact(lo)))
}

/// Critical clearing time for a dip to `v_dip` pu: the longest duration
/// after which the loop still regains synchronism, bisected over full
/// simulations to 1 ms, probing durations up to `horizon` seconds.
pub fn critical_clearing_time(
    p_set: f64,
    v_dip: f64,
    gfc: &GfcParams,
    net: &NetworkParams,
    f_nominal: f64,
    mode: FeedbackMode,
    horizon: f64,
) -> Result<Cct> {
    let mut gfc_probe = *gfc;
    gfc_probe.p_set = p_set;
    let probe = |duration: f64| -> Result<bool> {
        let sig = build_signal(
            &[Event::VoltageDip {
                t_start: 1.0,
                duration_s: duration,
                v_dip,
            }],
            f_nominal,
            net.vg_nominal,
        )?;
        let mut sim = SimConfig::new(mode);
        sim.t_end = 1.0 + duration + 10.0;
        Ok(run(&sig, &gfc_probe, net, &sim)?.verdict.is_stable())
    };

    let resolution = 1e-3;
    let mut lo = resolution;
    if !probe(lo)? {
        return Ok(Cct::UnstableAtZero);
    }
    let mut hi = horizon;
    if probe(hi)? {
        return Ok(Cct::AtLeast(horizon));
    }
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if probe(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Cct::Finite(lo))
}

/// Equal-area criterion for a fault cleared at `clearing_delta`: the
/// accelerating area is integrated under the fault curve from the
/// pre-fault equilibrium to the clearing angle, the decelerating area
/// under the post curve from the clearing angle to the post-curve
/// unstable equilibrium. Adaptive Simpson quadrature to 1e-8.
pub fn equal_area(
    p_set: f64,
    pre: &CurveEvaluator,
    fault: &CurveEvaluator,
    post: &CurveEvaluator,
    mode: FeedbackMode,
    clearing_delta: f64,
) -> Result<EacAreas> {
    let delta0 = pre.rising_crossing(mode, p_set)?;
    let delta_u_post = post.falling_crossing(mode, p_set)?;
    if clearing_delta < delta0 - 1e-12 || clearing_delta > delta_u_post + 1e-12 {
        return Err(Error::Analysis(format!(
            "clearing angle {clearing_delta} outside [{delta0}, {delta_u_post}]"
        )));
    }
    let accelerating = adaptive_simpson(
        &|d| p_set - fault.feedback_power(mode, d),
        delta0,
        clearing_delta,
        1e-8,
    );
    let decelerating = adaptive_simpson(
        &|d| post.feedback_power(mode, d) - p_set,
        clearing_delta,
        delta_u_post,
        1e-8,
    );
    Ok(EacAreas {
        accelerating,
        decelerating,
        stable: decelerating >= accelerating,
    })
}

/// Adaptive Simpson quadrature with interval-halving error control.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let err = left + right - whole;
        if depth == 0 || err.abs() <= 15.0 * tol {
            left + right + err / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// All margins for one feedback mode.
#[derive(Debug, Clone)]
pub struct MarginReport {
    pub mode: FeedbackMode,
    pub p_set: f64,
    /// Phase-jump margin from curve geometry, rad.
    pub phase_margin_static: f64,
    /// Phase-jump margin from simulation bisection, rad.
    pub phase_margin_dynamic: Bound,
    /// Largest sustainable ramp rate from the power budget, Hz/s.
    pub rocof_static: f64,
    /// Largest sustainable ramp rate from simulation bisection, Hz/s.
    pub rocof_dynamic: Bound,
    /// Critical clearing time for the configured dip, s.
    pub cct: Cct,
    /// Equal-area diagnostic for the configured dip scenario.
    pub eac: EacAreas,
}

/// Scenario knobs for [`margin_report`].
#[derive(Debug, Clone, Copy)]
pub struct MarginScenario {
    /// Ramp target frequency, Hz.
    pub f_end_hz: f64,
    /// Dip retained voltage, pu.
    pub v_dip: f64,
    /// Dip duration used for the equal-area diagnostic, s.
    pub dip_duration: f64,
    /// Longest dip duration probed by the clearing-time search, s.
    pub cct_horizon: f64,
}

impl Default for MarginScenario {
    fn default() -> Self {
        Self {
            f_end_hz: 48.0,
            v_dip: 0.5,
            dip_duration: 0.3,
            cct_horizon: 2.0,
        }
    }
}

/// Compute the full margin report for one feedback mode. Bisection order
/// is fixed, so results are deterministic regardless of how callers
/// schedule the probes.
pub fn margin_report(
    gfc: &GfcParams,
    net: &NetworkParams,
    f_nominal: f64,
    mode: FeedbackMode,
    scenario: &MarginScenario,
) -> Result<MarginReport> {
    let p_set = gfc.p_set;
    let phase_static = max_phase_jump(p_set, gfc, net, f_nominal, mode, false)?.value();
    let phase_dynamic = max_phase_jump(p_set, gfc, net, f_nominal, mode, true)?;
    let (rocof_static, rocof_dynamic) =
        max_rocof(p_set, gfc, net, f_nominal, mode, scenario.f_end_hz, true)?;
    let cct = critical_clearing_time(
        p_set,
        scenario.v_dip,
        gfc,
        net,
        f_nominal,
        mode,
        scenario.cct_horizon,
    )?;

    // equal-area diagnostic at the angle reached after the configured dip
    let pre = CurveEvaluator::from_params(gfc, net);
    let fault = CurveEvaluator::with_vg(gfc, net, scenario.v_dip);
    let sig = build_signal(
        &[Event::VoltageDip {
            t_start: 1.0,
            duration_s: scenario.dip_duration,
            v_dip: scenario.v_dip,
        }],
        f_nominal,
        net.vg_nominal,
    )?;
    let mut sim = SimConfig::new(mode);
    sim.t_end = 1.0 + scenario.dip_duration;
    let traj = run(&sig, gfc, net, &sim)?;
    let clearing_delta = traj.final_delta();
    let delta_u_post = pre.falling_crossing(mode, p_set)?;
    let eac = equal_area(
        p_set,
        &pre,
        &fault,
        &pre,
        mode,
        clearing_delta.min(delta_u_post),
    )?;

    Ok(MarginReport {
        mode,
        p_set,
        phase_margin_static: phase_static,
        phase_margin_dynamic: phase_dynamic,
        rocof_static,
        rocof_dynamic,
        cct,
        eac,
    })
}
