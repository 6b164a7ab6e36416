//! Default study-case parameters: a 1 pu internal voltage behind 0.3 pu of
//! virtual reactance, 0.2 pu of external reactance to a 1 pu infinite bus,
//! a 1.1 pu circular current limit, 10 s of virtual inertia and a damping
//! coefficient of 0.4, at 50 Hz.

use crate::types::{FeedbackMode, GfcParams, NetworkParams};

pub const F_NOMINAL_HZ: f64 = 50.0;

pub fn gfc_params() -> GfcParams {
    GfcParams {
        h_inertia: 10.0,
        zeta: 0.4,
        r_droop: 0.0,
        r_v: 0.03,
        x_v: 0.3,
        i_lim: 1.1,
        e_mag: 1.0,
        p_set: 0.8,
        feedback_mode: FeedbackMode::MeasuredPower,
    }
}

pub fn network_params() -> NetworkParams {
    NetworkParams {
        x_tf: 0.1,
        x_g: 0.1,
        vg_nominal: 1.0,
    }
}

pub fn omega_base() -> f64 {
    2.0 * std::f64::consts::PI * F_NOMINAL_HZ
}
