//! Quasi-static electrical relations: virtual-admittance current reference,
//! circular current limiter, power transfer with and without limiting,
//! internal impedance under limiting, virtual power, and power-angle curve
//! sweeps.
//!
//! Only reactances enter the power-angle algebra; the virtual resistance is
//! carried in the dq current computation but its drop is neglected, so the
//! active power at the internal voltage terminal equals the PCC power.
//!
//! Under current limiting the injected current keeps the angle of the
//! unsaturated reference at magnitude `i_lim`, which makes the delivered
//! power `e*vg*sin(delta)/M_v * i_lim` with `M_v` the chord length between
//! the two voltage phasors. That expression contains no network reactance:
//! power transfer in the limited region is independent of it. The
//! self-consistent limiter scaling solves
//!
//! ```text
//! kc_lim = (M_v/i_lim - x_ext) / x_v
//! ```
//!
//! because dividing the injected current by `kc_lim` acts like dividing the
//! grid-side reactance by `kc_lim` in the equivalent circuit seen by the
//! unsaturated reference. The virtual power computed from the unsaturated
//! reference,
//!
//! ```text
//! p_virt = e*vg*sin(delta) / (x_v + x_ext/kc_lim)
//! ```
//!
//! keeps rising with `delta` past the point where the measured power
//! saturates, which is what restores synchronizing feedback under limiting.

use crate::error::{Error, Result};
use crate::types::{chord_length, DqVector, FeedbackMode, GfcParams, NetworkParams};

/// Algebraic solution of the converter-network circuit at one rotor angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Rotor angle, rad.
    pub delta: f64,
    /// Delivered (saturated) active power at the PCC, pu.
    pub p_pcc: f64,
    /// Delivered reactive power at the PCC, pu.
    pub q_pcc: f64,
    /// Virtual active power from the unsaturated current reference, pu.
    pub p_virt: f64,
    /// Magnitude of the unsaturated current reference, pu.
    pub i_mag_unsat: f64,
    /// Magnitude of the injected current, pu.
    pub i_mag_actual: f64,
    /// Limiter scaling factor, >= 1.
    pub kc_lim: f64,
    /// Whether the limiter is active.
    pub limited: bool,
}

impl OperatingPoint {
    /// Feedback power for the given synchronization mode.
    pub fn feedback_power(&self, mode: FeedbackMode) -> f64 {
        match mode {
            FeedbackMode::MeasuredPower => self.p_pcc,
            FeedbackMode::VirtualPower => self.p_virt,
        }
    }
}

/// Sampled power-angle curves over `delta` in [0, pi].
#[derive(Debug, Clone)]
pub struct PowerAngleCurve {
    /// Sample angles, rad, sorted ascending.
    pub deltas: Vec<f64>,
    /// Power transfer with the limiter disabled, pu.
    pub p_unlimited: Vec<f64>,
    /// Delivered power with the limiter active (composite curve), pu.
    pub p_limited: Vec<f64>,
    /// Virtual power (composite curve), pu.
    pub p_virtual: Vec<f64>,
    /// Angle at which the limiter becomes active, if it does in (0, pi].
    pub activation_delta: Option<f64>,
}

/// Unsaturated current reference from the virtual admittance:
/// `(E - v_pcc) / (r_v + j*x_v)` with the internal voltage on the d-axis.
pub fn unsaturated_current(e_mag: f64, v_pcc: DqVector, r_v: f64, x_v: f64) -> Result<DqVector> {
    let den = r_v * r_v + x_v * x_v;
    if den == 0.0 {
        return Err(Error::InvalidParameter(
            "virtual impedance must be nonzero".to_string(),
        ));
    }
    let nd = e_mag - v_pcc.d;
    let nq = -v_pcc.q;
    Ok(DqVector::new(
        (nd * r_v + nq * x_v) / den,
        (nq * r_v - nd * x_v) / den,
    ))
}

/// Circular current limit: scales the reference down to magnitude `i_lim`
/// while preserving its angle. Returns the (possibly) saturated vector and
/// the scaling factor `kc_lim`, clamped to >= 1 so sub-limit currents pass
/// through unchanged.
pub fn apply_current_limit(i_ref: DqVector, i_lim: f64) -> (DqVector, f64) {
    debug_assert!(i_lim > 0.0);
    let kc_lim = (i_ref.magnitude() / i_lim).max(1.0);
    (i_ref.scale(1.0 / kc_lim), kc_lim)
}

/// Active and reactive power delivered at the PCC for rotor angle `delta`,
/// with the circular limiter in circuit. Returns `(p, q, limited)`.
///
/// Below the limit this is the familiar `e*vg*sin(delta)/x_total`; above it
/// both power components scale down by the same factor because the limiter
/// preserves the current angle, giving `e*vg*sin(delta)/M_v * i_lim`.
pub fn measured_power(delta: f64, e: f64, vg: f64, x_total: f64, i_lim: f64) -> (f64, f64, bool) {
    debug_assert!(x_total > 0.0);
    let m_v = chord_length(e, vg, delta);
    if m_v / x_total <= i_lim {
        let p = e * vg * delta.sin() / x_total;
        let q = (e * e - e * vg * delta.cos()) / x_total;
        (p, q, false)
    } else {
        let p = e * vg * delta.sin() / m_v * i_lim;
        let q = (e * e - e * vg * delta.cos()) / m_v * i_lim;
        (p, q, true)
    }
}

/// Smallest angle in (0, pi] at which the unsaturated current magnitude
/// reaches `i_lim`, from `cos(delta) = (e^2 + vg^2 - (i_lim*x_total)^2) /
/// (2*e*vg)`. `None` when the limiter state does not change over (0, pi]
/// (never activates, or is active for every angle).
pub fn limiter_activation_angle(e: f64, vg: f64, x_total: f64, i_lim: f64) -> Option<f64> {
    if e <= 0.0 || vg <= 0.0 {
        return None;
    }
    let c = (e * e + vg * vg - (i_lim * x_total).powi(2)) / (2.0 * e * vg);
    if !(-1.0..=1.0).contains(&c) {
        return None;
    }
    Some(c.acos())
}

/// Virtual power and self-consistent limiter scaling for rotor angle
/// `delta`. Returns `(p_virt, kc_lim)`.
///
/// `x_ext` is the reactance external to the virtual impedance; the
/// unsaturated branch reduces to `e*vg*sin(delta)/(x_v + x_ext)`.
pub fn virtual_power(
    delta: f64,
    e: f64,
    vg: f64,
    x_v: f64,
    x_ext: f64,
    i_lim: f64,
) -> Result<(f64, f64)> {
    debug_assert!(x_v > 0.0 && x_ext > 0.0);
    let x_total = x_v + x_ext;
    let m_v = chord_length(e, vg, delta);
    if m_v / x_total <= i_lim {
        return Ok((e * vg * delta.sin() / x_total, 1.0));
    }
    let kc_lim = (m_v / i_lim - x_ext) / x_v;
    if kc_lim < 1.0 - 1e-9 {
        return Err(Error::InconsistentSaturation { kc_lim });
    }
    let p_virt = e * vg * delta.sin() / (x_v + x_ext / kc_lim);
    Ok((p_virt, kc_lim))
}

/// Internal impedance presented by the current-limited converter:
/// `kc_lim * (r_v + j*x_v)`.
pub fn internal_impedance(kc_lim: f64, r_v: f64, x_v: f64) -> (f64, f64) {
    debug_assert!(kc_lim >= 1.0);
    (kc_lim * r_v, kc_lim * x_v)
}

/// Curve evaluator for one converter/network parameter set at one grid
/// voltage. All methods are pure; sweeps parallelize freely.
#[derive(Debug, Clone, Copy)]
pub struct CurveEvaluator {
    pub e: f64,
    pub vg: f64,
    pub x_v: f64,
    pub x_ext: f64,
    pub i_lim: f64,
}

impl CurveEvaluator {
    pub fn from_params(gfc: &GfcParams, net: &NetworkParams) -> Self {
        Self::with_vg(gfc, net, net.vg_nominal)
    }

    pub fn with_vg(gfc: &GfcParams, net: &NetworkParams, vg: f64) -> Self {
        Self {
            e: gfc.e_mag,
            vg,
            x_v: gfc.x_v,
            x_ext: net.x_ext(),
            i_lim: gfc.i_lim,
        }
    }

    pub fn x_total(&self) -> f64 {
        self.x_v + self.x_ext
    }

    /// Power transfer with the limiter disabled.
    pub fn unlimited_power(&self, delta: f64) -> f64 {
        self.e * self.vg * delta.sin() / self.x_total()
    }

    pub fn activation_angle(&self) -> Option<f64> {
        limiter_activation_angle(self.e, self.vg, self.x_total(), self.i_lim)
    }

    /// Full algebraic solution at one rotor angle.
    ///
    /// The saturation state, delivered power, and the self-consistent
    /// `kc_lim` are properties of the circuit alone; the feedback mode only
    /// selects which power signal the synchronization loop sees.
    pub fn operating_point(&self, delta: f64) -> OperatingPoint {
        let x_total = self.x_total();
        let m_v = chord_length(self.e, self.vg, delta);
        let i_free = m_v / x_total;
        if i_free <= self.i_lim {
            let p = self.e * self.vg * delta.sin() / x_total;
            let q = (self.e * self.e - self.e * self.vg * delta.cos()) / x_total;
            OperatingPoint {
                delta,
                p_pcc: p,
                q_pcc: q,
                p_virt: p,
                i_mag_unsat: i_free,
                i_mag_actual: i_free,
                kc_lim: 1.0,
                limited: false,
            }
        } else {
            let kc_lim = (m_v / self.i_lim - self.x_ext) / self.x_v;
            let p = self.e * self.vg * delta.sin() / m_v * self.i_lim;
            let q = (self.e * self.e - self.e * self.vg * delta.cos()) / m_v * self.i_lim;
            let p_virt = self.e * self.vg * delta.sin() / (self.x_v + self.x_ext / kc_lim);
            OperatingPoint {
                delta,
                p_pcc: p,
                q_pcc: q,
                p_virt,
                i_mag_unsat: kc_lim * self.i_lim,
                i_mag_actual: self.i_lim,
                kc_lim,
                limited: true,
            }
        }
    }

    /// Feedback power seen by the synchronization loop in the given mode.
    pub fn feedback_power(&self, mode: FeedbackMode, delta: f64) -> f64 {
        self.operating_point(delta).feedback_power(mode)
    }

    /// Smallest angle in [0, peak] where the feedback curve rises through
    /// `target` (which must be >= 0). This is the stable-equilibrium
    /// crossing for a setpoint equal to `target`.
    pub fn rising_crossing(&self, mode: FeedbackMode, target: f64) -> Result<f64> {
        let (delta_peak, p_peak) = self.peak(mode);
        if target > p_peak {
            return Err(Error::InfeasibleSetpoint {
                p_set: target,
                p_max: p_peak,
            });
        }
        if target <= 0.0 {
            return Ok(0.0);
        }
        Ok(bisect_crossing(
            |d| self.feedback_power(mode, d) - target,
            0.0,
            delta_peak,
        ))
    }

    /// Angle in [peak, pi] where the feedback curve falls back through
    /// `target` (>= 0): the unstable-equilibrium crossing.
    pub fn falling_crossing(&self, mode: FeedbackMode, target: f64) -> Result<f64> {
        let (delta_peak, p_peak) = self.peak(mode);
        if target > p_peak {
            return Err(Error::InfeasibleSetpoint {
                p_set: target,
                p_max: p_peak,
            });
        }
        Ok(bisect_crossing(
            |d| target - self.feedback_power(mode, d),
            delta_peak,
            std::f64::consts::PI,
        ))
    }

    /// Location and value of the feedback-curve maximum over [0, pi],
    /// found by a coarse scan refined with golden-section search.
    pub fn peak(&self, mode: FeedbackMode) -> (f64, f64) {
        const N: usize = 2048;
        let f = |d: f64| self.feedback_power(mode, d);
        let mut best_i = 0;
        let mut best_p = f64::NEG_INFINITY;
        for i in 0..=N {
            let d = std::f64::consts::PI * i as f64 / N as f64;
            let p = f(d);
            if p > best_p {
                best_p = p;
                best_i = i;
            }
        }
        let lo = std::f64::consts::PI * best_i.saturating_sub(1) as f64 / N as f64;
        let hi = std::f64::consts::PI * (best_i + 1).min(N) as f64 / N as f64;
        golden_max(f, lo, hi)
    }
}

/// Bisection for the root of a function that is <= 0 at `lo` and >= 0 at
/// `hi`, to a residual below 1e-10 and an interval below 1e-12 rad.
fn bisect_crossing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() < 1e-10 && hi - lo < 1e-12 {
            return mid;
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section maximization on [lo, hi] for a unimodal function.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..120 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let d = 0.5 * (lo + hi);
    (d, f(d))
}

/// Sweep the unlimited, limited, and virtual power-angle curves over
/// `delta` in [0, pi] with `n_points` samples (inclusive endpoints).
pub fn sweep_curves(
    gfc: &GfcParams,
    net: &NetworkParams,
    vg: f64,
    n_points: usize,
) -> PowerAngleCurve {
    assert!(n_points >= 2, "n_points must be >= 2");
    let ev = CurveEvaluator::with_vg(gfc, net, vg);
    let mut deltas = Vec::with_capacity(n_points);
    let mut p_unlimited = Vec::with_capacity(n_points);
    let mut p_limited = Vec::with_capacity(n_points);
    let mut p_virtual = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let delta = std::f64::consts::PI * i as f64 / (n_points - 1) as f64;
        let op = ev.operating_point(delta);
        deltas.push(delta);
        p_unlimited.push(ev.unlimited_power(delta));
        p_limited.push(op.p_pcc);
        p_virtual.push(op.p_virt);
    }
    PowerAngleCurve {
        deltas,
        p_unlimited,
        p_limited,
        p_virtual,
        activation_delta: ev.activation_angle(),
    }
}
