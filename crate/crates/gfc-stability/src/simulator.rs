//! Fixed-step RK4 integration of the closed synchronization loop.
//!
//! The state is two-dimensional: the controller filter state and the rotor
//! angle `delta = theta_vsc - theta_g` (unwrapped). The algebraic
//! electrical layer is re-evaluated inside every integration stage, per
//! the time-scale separation between the current limiter and the power
//! control. Frequencies are carried in per-unit with
//!
//! ```text
//! d(delta)/dt = omega_b * (omega_vsc_pu - omega_g_pu)
//! ```
//!
//! Steps are aligned to event instants, so every stage evaluation sees a
//! smooth stretch of the grid signal and phase jumps land exactly between
//! steps as discrete rotor-angle resets.
//!
//! A run starts at the pre-event equilibrium with the controller state
//! preloaded so the converter frequency matches the grid (no artificial
//! initial transient). Loss of synchronism is declared the first time
//! `|delta - delta_ref|` exceeds the threshold (default pi, one pole slip)
//! while still moving away, where `delta_ref` is the post-event
//! equilibrium when one exists and the initial equilibrium otherwise.

use crate::control::{self, ControllerGains, ControllerState};
use crate::electrical::CurveEvaluator;
use crate::error::{Error, Result};
use crate::scenario::GridSignal;
use crate::types::{FeedbackMode, GfcParams, NetworkParams};

/// Simulation settings.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    /// End time, s.
    pub t_end: f64,
    /// Integration step, s.
    pub dt: f64,
    /// Record every n-th step (1 records all).
    pub record_every: usize,
    /// Loss-of-synchronism threshold on `|delta - delta_ref|`, rad.
    pub los_threshold: f64,
    /// Synchronization feedback selection.
    pub mode: FeedbackMode,
}

impl SimConfig {
    pub fn new(mode: FeedbackMode) -> Self {
        Self {
            t_end: 20.0,
            dt: 1e-3,
            record_every: 1,
            los_threshold: std::f64::consts::PI,
            mode,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if !self.t_end.is_finite() || self.t_end <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "t_end must be > 0, got {}",
                self.t_end
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be >= 1".into()));
        }
        if !self.los_threshold.is_finite() || self.los_threshold <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "los_threshold must be > 0, got {}",
                self.los_threshold
            )));
        }
        Ok(())
    }
}

/// Outcome of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Stable,
    LossOfSync { t_los: f64 },
}

impl Verdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, Verdict::Stable)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Stable => write!(f, "stable"),
            Verdict::LossOfSync { t_los } => write!(f, "loss of synchronism at t = {t_los:.3} s"),
        }
    }
}

/// Recorded time series of simulator state and algebraic outputs.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    /// Rotor angle, rad, unwrapped.
    pub delta: Vec<f64>,
    pub omega_vsc_pu: Vec<f64>,
    pub omega_g_pu: Vec<f64>,
    pub p_pcc: Vec<f64>,
    pub q_pcc: Vec<f64>,
    pub p_virt: Vec<f64>,
    /// Injected current magnitude, pu.
    pub i_mag: Vec<f64>,
    pub kc_lim: Vec<f64>,
    pub vg: Vec<f64>,
    pub limited: Vec<bool>,
    pub verdict: Verdict,
    /// Equilibrium the verdict is measured against.
    pub delta_ref: f64,
    /// Pre-event equilibrium angle.
    pub delta0: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn final_delta(&self) -> f64 {
        *self.delta.last().unwrap()
    }
}

/// Stable equilibrium angle for the given setpoint: the smallest angle at
/// which the mode's feedback curve crosses `p_set` on its rising branch,
/// found by bisection to a power mismatch below 1e-10 pu.
pub fn find_equilibrium(
    p_set: f64,
    vg: f64,
    gfc: &GfcParams,
    net: &NetworkParams,
    mode: FeedbackMode,
) -> Result<f64> {
    let ev = CurveEvaluator::with_vg(gfc, net, vg);
    // odd symmetry: a negative setpoint sits at the mirrored angle
    let sign = if p_set < 0.0 { -1.0 } else { 1.0 };
    match ev.rising_crossing(mode, p_set.abs()) {
        Ok(d) => Ok(sign * d),
        Err(Error::InfeasibleSetpoint { p_max, .. }) => {
            Err(Error::InfeasibleSetpoint { p_set, p_max })
        }
        Err(e) => Err(e),
    }
}

/// Loss-of-synchronism scan over a recorded angle series: the first sample
/// beyond the threshold that is still moving away from `delta_ref` marks a
/// pole slip.
pub fn detect_loss_of_sync(t: &[f64], delta: &[f64], delta_ref: f64, threshold: f64) -> Verdict {
    for i in 1..delta.len() {
        let dev = delta[i] - delta_ref;
        if dev.abs() > threshold && dev * (delta[i] - delta[i - 1]) > 0.0 {
            return Verdict::LossOfSync { t_los: t[i] };
        }
    }
    Verdict::Stable
}

struct Loop<'a> {
    signal: &'a GridSignal,
    gfc: &'a GfcParams,
    net: &'a NetworkParams,
    gains: ControllerGains,
    mode: FeedbackMode,
    omega_base: f64,
}

impl Loop<'_> {
    /// Closed-loop derivative `(dx_ctrl/dt, d(delta)/dt)` with the
    /// algebraic layer evaluated at stage time `t` inside segment `seg`.
    fn deriv(&self, seg: usize, p_set: f64, t: f64, x_ctrl: f64, delta: f64) -> (f64, f64) {
        let g = self.signal.eval_in(seg, t);
        let ev = CurveEvaluator::with_vg(self.gfc, self.net, g.vg);
        let e = p_set - ev.feedback_power(self.mode, delta);
        let state = ControllerState {
            x: x_ctrl,
            last_error: e,
        };
        let (dx, d_omega) = control::continuous_derivative(&state, &self.gains, e);
        let d_delta = d_omega - self.omega_base * (g.omega_g_pu - 1.0);
        (dx, d_delta)
    }

    fn rk4_step(&self, seg: usize, p_set: f64, t: f64, h: f64, x: f64, delta: f64) -> (f64, f64) {
        let (k1x, k1d) = self.deriv(seg, p_set, t, x, delta);
        let (k2x, k2d) = self.deriv(
            seg,
            p_set,
            t + 0.5 * h,
            x + 0.5 * h * k1x,
            delta + 0.5 * h * k1d,
        );
        let (k3x, k3d) = self.deriv(
            seg,
            p_set,
            t + 0.5 * h,
            x + 0.5 * h * k2x,
            delta + 0.5 * h * k2d,
        );
        let (k4x, k4d) = self.deriv(seg, p_set, t + h, x + h * k3x, delta + h * k3d);
        (
            x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            delta + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d),
        )
    }
}

/// Simulate the closed loop against the given grid signal.
pub fn run(
    signal: &GridSignal,
    gfc: &GfcParams,
    net: &NetworkParams,
    sim: &SimConfig,
) -> Result<Trajectory> {
    gfc.validate()?;
    net.validate()?;
    sim.validate()?;

    let omega_base = signal.omega_base();
    let p_max = gfc.e_mag * net.vg_nominal / net.x_total(gfc.x_v);
    let gains = control::derive_gains(gfc.h_inertia, gfc.r_droop, gfc.zeta, omega_base, p_max)?;

    let g0 = signal.at(0.0);
    let p_set0 = signal.p_set_at(0.0, gfc.p_set);
    let delta0 = find_equilibrium(p_set0, g0.vg, gfc, net, sim.mode)?;

    // reference for the verdict: post-event equilibrium when it exists
    let delta_ref = find_equilibrium(
        signal.final_p_set(gfc.p_set),
        signal.final_vg(),
        gfc,
        net,
        sim.mode,
    )
    .unwrap_or(delta0);

    // transient-free start: output matches the grid frequency deviation
    let ev0 = CurveEvaluator::with_vg(gfc, net, g0.vg);
    let e0 = p_set0 - ev0.feedback_power(sim.mode, delta0);
    let ctrl0 = ControllerState::for_output(omega_base * (g0.omega_g_pu - 1.0), e0, &gains);

    let lp = Loop {
        signal,
        gfc,
        net,
        gains,
        mode: sim.mode,
        omega_base,
    };

    let mut traj = Trajectory {
        t: Vec::new(),
        delta: Vec::new(),
        omega_vsc_pu: Vec::new(),
        omega_g_pu: Vec::new(),
        p_pcc: Vec::new(),
        q_pcc: Vec::new(),
        p_virt: Vec::new(),
        i_mag: Vec::new(),
        kc_lim: Vec::new(),
        vg: Vec::new(),
        limited: Vec::new(),
        verdict: Verdict::Stable,
        delta_ref,
        delta0,
    };

    let mut x = ctrl0.x;
    let mut delta = delta0;
    let mut verdict = Verdict::Stable;

    let record = |traj: &mut Trajectory, lp: &Loop, t: f64, x: f64, delta: f64| {
        let g = lp.signal.at(t);
        let ev = CurveEvaluator::with_vg(lp.gfc, lp.net, g.vg);
        let op = ev.operating_point(delta);
        let e = lp.signal.p_set_at(t, lp.gfc.p_set) - op.feedback_power(lp.mode);
        let d_omega = x + lp.gains.k_pp * e;
        traj.t.push(t);
        traj.delta.push(delta);
        traj.omega_vsc_pu.push(1.0 + d_omega / lp.omega_base);
        traj.omega_g_pu.push(g.omega_g_pu);
        traj.p_pcc.push(op.p_pcc);
        traj.q_pcc.push(op.q_pcc);
        traj.p_virt.push(op.p_virt);
        traj.i_mag.push(op.i_mag_actual);
        traj.kc_lim.push(op.kc_lim);
        traj.vg.push(g.vg);
        traj.limited.push(op.limited);
    };

    record(&mut traj, &lp, 0.0, x, delta);

    let mut step_count: usize = 0;
    for seg in 0..signal.segment_count() {
        let (s0, s1) = signal.segment_bounds(seg);
        let t_a = s0.max(0.0);
        let t_b = s1.min(sim.t_end);
        if t_a >= sim.t_end {
            break;
        }
        if s0 > 0.0 {
            if let Some(jump) = signal.rotor_jump_at(s0) {
                delta += jump;
            }
        }
        if t_b <= t_a {
            continue;
        }
        let p_set = signal.p_set_in(seg, gfc.p_set);
        let n = ((t_b - t_a) / sim.dt).ceil().max(1.0) as usize;
        let h = (t_b - t_a) / n as f64;
        let mut delta_prev = delta;
        for k in 0..n {
            let t = t_a + k as f64 * h;
            let (x_new, delta_new) = lp.rk4_step(seg, p_set, t, h, x, delta);
            if !(x_new.is_finite() && delta_new.is_finite()) {
                return Err(Error::NonFiniteState { t: t + h });
            }
            x = x_new;
            delta = delta_new;
            let t_new = if k + 1 == n { t_b } else { t + h };
            if verdict.is_stable() {
                let dev = delta - delta_ref;
                if dev.abs() > sim.los_threshold && dev * (delta - delta_prev) > 0.0 {
                    verdict = Verdict::LossOfSync { t_los: t_new };
                }
            }
            delta_prev = delta;
            step_count += 1;
            if step_count.is_multiple_of(sim.record_every) && t_new < sim.t_end {
                record(&mut traj, &lp, t_new, x, delta);
            }
        }
    }
    record(&mut traj, &lp, sim.t_end, x, delta);

    traj.verdict = verdict;
    Ok(traj)
}
