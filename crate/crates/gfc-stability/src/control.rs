//! Lead-lag power-synchronization controller.
//!
//! The active power control loop maps power error to the angular-frequency
//! deviation of the converter's virtual rotor through the compensator
//!
//! ```text
//! delta_omega = (k_pp*s + k_ip) / (s + k_gp) * (p_set - p_fb)
//! ```
//!
//! which realizes a virtual inertia constant `H`, a frequency droop `R_d`,
//! and an extra damping degree of freedom `zeta`. The compensator output
//! here is the angular-frequency deviation in rad/s; divide by the base
//! angular frequency for per-unit. With this convention a constant power
//! error `e` and no droop ramps the rotor at `k_ip*e = omega_b*e/(2H)`
//! rad/s^2, the classic swing equation.
//!
//! Two realizations are provided: a continuous-time single-state form for
//! the ODE simulator, and a trapezoidal (bilinear) discrete form matching a
//! digital controller sampled at a fixed period.

use crate::error::{Error, Result};

/// Compensator gains. Usually built by [`derive_gains`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains {
    /// Lead (proportional) gain.
    pub k_pp: f64,
    /// Integral gain, `omega_b / (2H)`.
    pub k_ip: f64,
    /// Lag pole, `k_droop / (2H)`; zero without droop.
    pub k_gp: f64,
    /// Inverse droop `1/r_droop`; zero when droop is disabled.
    pub k_droop: f64,
}

/// Derive compensator gains from inertia `h` (s), droop `r_droop` (pu, 0
/// disables), damping coefficient `zeta`, base angular frequency (rad/s),
/// and the maximum static power transfer `p_max` (pu) of the unlimited
/// circuit.
pub fn derive_gains(
    h: f64,
    r_droop: f64,
    zeta: f64,
    omega_base: f64,
    p_max: f64,
) -> Result<ControllerGains> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "inertia must be > 0, got {h}"
        )));
    }
    if !p_max.is_finite() || p_max <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "p_max must be > 0, got {p_max}"
        )));
    }
    if r_droop < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "r_droop must be >= 0, got {r_droop}"
        )));
    }
    let k_droop = if r_droop == 0.0 { 0.0 } else { 1.0 / r_droop };
    let k_ip = omega_base / (2.0 * h);
    let k_gp = k_droop / (2.0 * h);
    let k_pp = zeta * (2.0 * omega_base / (p_max * h)).sqrt() - k_droop / (2.0 * h * p_max);
    if k_pp < 0.0 {
        return Err(Error::NegativeLeadGain {
            k_pp,
            r_droop,
            zeta,
        });
    }
    Ok(ControllerGains {
        k_pp,
        k_ip,
        k_gp,
        k_droop,
    })
}

/// Controller memory: one filter state plus the previous error sample for
/// the trapezoidal path.
///
/// The output `delta_omega = x + k_pp*e` reproduces the transfer function
/// `(k_pp*s + k_ip)/(s + k_gp)` acting on the error `e`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerState {
    /// Internal filter state (rad/s contribution to the output).
    pub x: f64,
    /// Previous error sample (pu power), used by [`trapezoidal_step`].
    pub last_error: f64,
}

impl ControllerState {
    pub fn new() -> Self {
        Self::default()
    }

    /// State that makes the output equal `delta_omega0` at error `e0`
    /// without a transient: `x = delta_omega0 - k_pp*e0`.
    pub fn for_output(delta_omega0: f64, e0: f64, gains: &ControllerGains) -> Self {
        Self {
            x: delta_omega0 - gains.k_pp * e0,
            last_error: e0,
        }
    }
}

/// Continuous-time realization: returns `(dx/dt, delta_omega)` for the
/// current state and power error.
///
/// ```text
/// dx/dt       = -k_gp*x + (k_ip - k_pp*k_gp)*e
/// delta_omega =  x + k_pp*e
/// ```
pub fn continuous_derivative(
    state: &ControllerState,
    gains: &ControllerGains,
    e: f64,
) -> (f64, f64) {
    let dx_dt = -gains.k_gp * state.x + (gains.k_ip - gains.k_pp * gains.k_gp) * e;
    let delta_omega = state.x + gains.k_pp * e;
    (dx_dt, delta_omega)
}

/// One trapezoidal (bilinear) update with sample period `t_s`:
/// the state equation is integrated with the trapezoid rule, which is
/// implicit in `x` but solvable in closed form for this single-state
/// filter. Returns the updated state and the output at the new sample.
pub fn trapezoidal_step(
    state: &ControllerState,
    gains: &ControllerGains,
    e_now: f64,
    t_s: f64,
) -> (ControllerState, f64) {
    debug_assert!(t_s > 0.0);
    let c = gains.k_ip - gains.k_pp * gains.k_gp;
    let half = 0.5 * t_s;
    let x_new = ((1.0 - half * gains.k_gp) * state.x + half * c * (e_now + state.last_error))
        / (1.0 + half * gains.k_gp);
    let delta_omega = x_new + gains.k_pp * e_now;
    (
        ControllerState {
            x: x_new,
            last_error: e_now,
        },
        delta_omega,
    )
}
