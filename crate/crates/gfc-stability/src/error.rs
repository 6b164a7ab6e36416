//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter record violates one of its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The lead gain came out negative: the droop term overwhelms the
    /// damping term and would invert the compensator's phase behavior.
    #[error(
        "derived lead gain k_pp = {k_pp:.6} is negative (droop 1/{r_droop} too large \
         for damping coefficient {zeta}); refusing to build controller gains"
    )]
    NegativeLeadGain { k_pp: f64, r_droop: f64, zeta: f64 },

    /// The requested power setpoint exceeds the maximum of the relevant
    /// power-angle curve, so no equilibrium exists.
    #[error("setpoint {p_set} pu is infeasible: power-angle curve maximum is {p_max:.6} pu")]
    InfeasibleSetpoint { p_set: f64, p_max: f64 },

    /// The saturated-branch scaling factor computed below 1 even though the
    /// unsaturated check reported saturation; inputs are inconsistent.
    #[error("inconsistent limiter state: kc_lim = {kc_lim:.9} < 1 in the saturated branch")]
    InconsistentSaturation { kc_lim: f64 },

    /// A scenario event list failed validation.
    #[error("scenario: {0}")]
    Scenario(String),

    /// The integrator produced a non-finite state.
    #[error("non-finite simulator state at t = {t} s")]
    NonFiniteState { t: f64 },

    /// A quantity required by an analysis routine is out of its bracket.
    #[error("analysis: {0}")]
    Analysis(String),

    /// Scenario configuration file could not be parsed.
    #[error("config parse error at line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
