//! Infinite-bus signal construction from declarative event lists.
//!
//! A [`GridSignal`] maps time to the bus voltage magnitude, per-unit
//! frequency, and absolute phase. It is built once from a list of events
//! and evaluated in closed form: within any segment the frequency is
//! affine in time, so the phase is the exact quadratic integral — no
//! numerical integration is involved.
//!
//! Sign convention for phase jumps: a positive `delta_theta` advances the
//! grid phase, so the rotor angle `delta = theta_vsc - theta_g` drops by
//! `delta_theta` at the jump instant and the converter has to accelerate
//! to resynchronize. That is the direction that stresses the
//! synchronization loop; pass a negative value for a grid phase that
//! falls back.

use crate::error::{Error, Result};

/// One grid or setpoint event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    /// Grid frequency ramps linearly from its current value to `f_end_hz`
    /// at `|rate_hz_per_s|` Hz/s, then holds.
    RocofRamp {
        t_start: f64,
        rate_hz_per_s: f64,
        f_end_hz: f64,
    },
    /// Grid phase steps by `delta_theta` radians at `t` (positive advances
    /// the grid, dropping the rotor angle by the same amount).
    PhaseJump { t: f64, delta_theta: f64 },
    /// Bus voltage steps to `v_dip` pu at `t_start` and restores after
    /// `duration_s`.
    VoltageDip {
        t_start: f64,
        duration_s: f64,
        v_dip: f64,
    },
    /// Active power setpoint changes to `p_set_new` at `t`.
    SetpointStep { t: f64, p_set_new: f64 },
}

impl Event {
    pub fn time(&self) -> f64 {
        match *self {
            Event::RocofRamp { t_start, .. } => t_start,
            Event::PhaseJump { t, .. } => t,
            Event::VoltageDip { t_start, .. } => t_start,
            Event::SetpointStep { t, .. } => t,
        }
    }
}

/// Grid quantities at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    /// Bus voltage magnitude, pu.
    pub vg: f64,
    /// Grid frequency, pu.
    pub omega_g_pu: f64,
    /// Grid phase, rad (exact integral of the frequency plus jumps).
    pub theta_g: f64,
}

/// One piecewise-smooth stretch of the signal.
#[derive(Debug, Clone, Copy)]
struct Segment {
    t_start: f64,
    t_end: f64,
    vg: f64,
    omega0_pu: f64,
    slope_pu_per_s: f64,
    theta0: f64,
    p_set: Option<f64>,
}

impl Segment {
    fn eval(&self, t: f64, omega_base: f64) -> GridPoint {
        let dt = t - self.t_start;
        GridPoint {
            vg: self.vg,
            omega_g_pu: self.omega0_pu + self.slope_pu_per_s * dt,
            theta_g: self.theta0
                + omega_base * (self.omega0_pu * dt + 0.5 * self.slope_pu_per_s * dt * dt),
        }
    }
}

/// Immutable, closed-form time functions of the infinite bus, plus the
/// setpoint schedule. Shareable across threads.
#[derive(Debug, Clone)]
pub struct GridSignal {
    segments: Vec<Segment>,
    /// Rotor-angle steps at segment boundaries: `(t, d_delta)` where
    /// `d_delta = -d_theta_g` is what a simulator adds to `delta` at `t`.
    rotor_jumps: Vec<(f64, f64)>,
    f_nominal: f64,
    omega_base: f64,
    vg_nominal: f64,
}

/// Internal edge actions applied at one instant during construction.
#[derive(Debug, Clone, Copy)]
enum Edge {
    RampStart { slope_pu_per_s: f64 },
    RampEnd { f_end_pu: f64 },
    DipStart { v_dip: f64 },
    DipEnd,
    Jump { delta_theta: f64 },
    Setpoint { p_set: f64 },
}

/// Build the closed-form signal for the given event list and nominal
/// frequency/voltage. Events must be sorted by time; voltage dips must not
/// overlap each other and frequency ramps must not overlap each other.
pub fn build_signal(events: &[Event], f_nominal: f64, vg_nominal: f64) -> Result<GridSignal> {
    if !f_nominal.is_finite() || f_nominal <= 0.0 {
        return Err(Error::Scenario(format!(
            "nominal frequency must be > 0, got {f_nominal}"
        )));
    }
    if !vg_nominal.is_finite() || vg_nominal <= 0.0 {
        return Err(Error::Scenario(format!(
            "nominal voltage must be > 0, got {vg_nominal}"
        )));
    }
    let omega_base = 2.0 * std::f64::consts::PI * f_nominal;

    let mut prev_t = 0.0;
    for ev in events {
        let t = ev.time();
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Scenario(format!(
                "event time must be non-negative, got {t}"
            )));
        }
        if t < prev_t {
            return Err(Error::Scenario(format!(
                "events must be sorted by time ({t} follows {prev_t})"
            )));
        }
        prev_t = t;
    }

    // Expand events into timestamped edges, checking per-kind overlaps.
    let mut edges: Vec<(f64, Edge)> = Vec::new();
    let mut freq_pu = 1.0;
    let mut ramp_end_prev = f64::NEG_INFINITY;
    let mut dip_end_prev = f64::NEG_INFINITY;
    for ev in events {
        match *ev {
            Event::RocofRamp {
                t_start,
                rate_hz_per_s,
                f_end_hz,
            } => {
                if !f_end_hz.is_finite() || f_end_hz <= 0.0 {
                    return Err(Error::Scenario(format!(
                        "ramp end frequency must be > 0, got {f_end_hz}"
                    )));
                }
                if t_start < ramp_end_prev {
                    return Err(Error::Scenario(format!(
                        "frequency ramp at t = {t_start} overlaps the previous ramp (ends at {ramp_end_prev})"
                    )));
                }
                let f_end_pu = f_end_hz / f_nominal;
                let df = f_end_pu - freq_pu;
                if df == 0.0 {
                    continue;
                }
                if rate_hz_per_s == 0.0 {
                    return Err(Error::Scenario(format!(
                        "ramp at t = {t_start} needs a nonzero rate to reach {f_end_hz} Hz"
                    )));
                }
                let slope_pu_per_s = df.signum() * rate_hz_per_s.abs() / f_nominal;
                let t_end = t_start + df.abs() * f_nominal / rate_hz_per_s.abs();
                edges.push((t_start, Edge::RampStart { slope_pu_per_s }));
                edges.push((t_end, Edge::RampEnd { f_end_pu }));
                freq_pu = f_end_pu;
                ramp_end_prev = t_end;
            }
            Event::PhaseJump { t, delta_theta } => {
                edges.push((t, Edge::Jump { delta_theta }));
            }
            Event::VoltageDip {
                t_start,
                duration_s,
                v_dip,
            } => {
                if !duration_s.is_finite() || duration_s <= 0.0 {
                    return Err(Error::Scenario(format!(
                        "dip duration must be > 0, got {duration_s}"
                    )));
                }
                if v_dip < 0.0 {
                    return Err(Error::Scenario(format!(
                        "dip voltage must be >= 0, got {v_dip}"
                    )));
                }
                if t_start < dip_end_prev {
                    return Err(Error::Scenario(format!(
                        "voltage dip at t = {t_start} overlaps the previous dip (ends at {dip_end_prev})"
                    )));
                }
                edges.push((t_start, Edge::DipStart { v_dip }));
                edges.push((t_start + duration_s, Edge::DipEnd));
                dip_end_prev = t_start + duration_s;
            }
            Event::SetpointStep { t, p_set_new } => {
                edges.push((t, Edge::Setpoint { p_set: p_set_new }));
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Sweep the edge list, closing a segment before each new edge time.
    let mut segments: Vec<Segment> = Vec::new();
    let mut rotor_jumps: Vec<(f64, f64)> = Vec::new();
    let mut cur = Segment {
        t_start: 0.0,
        t_end: f64::INFINITY,
        vg: vg_nominal,
        omega0_pu: 1.0,
        slope_pu_per_s: 0.0,
        theta0: 0.0,
        p_set: None,
    };
    let mut i = 0;
    while i < edges.len() {
        let t_edge = edges[i].0;
        if t_edge > cur.t_start {
            // close the running segment at the edge and roll its state forward
            let at_edge = cur.eval(t_edge, omega_base);
            segments.push(Segment {
                t_end: t_edge,
                ..cur
            });
            cur.t_start = t_edge;
            cur.omega0_pu = at_edge.omega_g_pu;
            cur.theta0 = at_edge.theta_g;
        }
        // apply every edge that shares this instant
        while i < edges.len() && edges[i].0 == t_edge {
            match edges[i].1 {
                Edge::RampStart { slope_pu_per_s } => cur.slope_pu_per_s = slope_pu_per_s,
                Edge::RampEnd { f_end_pu } => {
                    cur.slope_pu_per_s = 0.0;
                    cur.omega0_pu = f_end_pu; // snap, no rounding residue
                }
                Edge::DipStart { v_dip } => cur.vg = v_dip,
                Edge::DipEnd => cur.vg = vg_nominal,
                Edge::Jump { delta_theta } => {
                    cur.theta0 += delta_theta;
                    match rotor_jumps.last_mut() {
                        Some(last) if last.0 == t_edge => last.1 -= delta_theta,
                        _ => rotor_jumps.push((t_edge, -delta_theta)),
                    }
                }
                Edge::Setpoint { p_set } => cur.p_set = Some(p_set),
            }
            i += 1;
        }
    }
    segments.push(cur);

    Ok(GridSignal {
        segments,
        rotor_jumps,
        f_nominal,
        omega_base,
        vg_nominal,
    })
}

impl GridSignal {
    /// Signal with no events: nominal voltage and frequency forever.
    pub fn quiet(f_nominal: f64, vg_nominal: f64) -> Result<Self> {
        build_signal(&[], f_nominal, vg_nominal)
    }

    pub fn f_nominal(&self) -> f64 {
        self.f_nominal
    }

    pub fn omega_base(&self) -> f64 {
        self.omega_base
    }

    pub fn vg_nominal(&self) -> f64 {
        self.vg_nominal
    }

    fn segment_index(&self, t: f64) -> usize {
        // last segment whose start is <= t
        match self.segments.binary_search_by(|s| s.t_start.total_cmp(&t)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        }
    }

    /// Evaluate at `t` (right-continuous at event instants).
    pub fn at(&self, t: f64) -> GridPoint {
        let t = t.max(0.0);
        self.segments[self.segment_index(t)].eval(t, self.omega_base)
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    /// `[t_start, t_end)` of segment `idx` (the last one is unbounded).
    pub fn segment_bounds(&self, idx: usize) -> (f64, f64) {
        (self.segments[idx].t_start, self.segments[idx].t_end)
    }

    /// Evaluate inside segment `idx`; `t` may equal the segment end, in
    /// which case this is the left limit at the boundary.
    pub fn eval_in(&self, idx: usize, t: f64) -> GridPoint {
        self.segments[idx].eval(t, self.omega_base)
    }

    /// Setpoint in force during segment `idx` (`base` until overridden).
    pub fn p_set_in(&self, idx: usize, base: f64) -> f64 {
        self.segments[idx].p_set.unwrap_or(base)
    }

    /// Setpoint in force at time `t`.
    pub fn p_set_at(&self, t: f64, base: f64) -> f64 {
        self.p_set_in(self.segment_index(t.max(0.0)), base)
    }

    /// Rotor-angle step to apply when crossing time `t`, if any
    /// (`delta += step`; equals minus the grid-phase jump).
    pub fn rotor_jump_at(&self, t: f64) -> Option<f64> {
        self.rotor_jumps
            .iter()
            .find(|(tj, _)| *tj == t)
            .map(|&(_, dj)| dj)
    }

    /// Bus voltage after all events have played out.
    pub fn final_vg(&self) -> f64 {
        self.segments.last().unwrap().vg
    }

    /// Grid frequency (pu) after all events have played out.
    pub fn final_omega_pu(&self) -> f64 {
        self.segments.last().unwrap().omega0_pu
    }

    /// Setpoint after all events have played out.
    pub fn final_p_set(&self, base: f64) -> f64 {
        self.segments.last().unwrap().p_set.unwrap_or(base)
    }
}
