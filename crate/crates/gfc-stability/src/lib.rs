//! Transient (synchronization) stability toolkit for a grid-forming
//! converter connected to an infinite bus.
//!
//! The converter is modeled quasi-statically: a lead-lag power controller
//! drives the virtual rotor angle, a virtual admittance turns the
//! voltage difference into a current reference, and a circular limiter
//! caps the current magnitude while preserving its angle. Under limiting
//! the delivered power becomes insensitive to the rotor angle, which is
//! what makes large frequency ramps, phase jumps, and voltage dips
//! dangerous; feeding back the *virtual* power computed from the
//! unsaturated current references restores the synchronizing term and
//! extends every stability margin.
//!
//! The crate provides:
//!
//! - [`electrical`]: power-angle algebra with and without the limiter,
//!   virtual-power characteristics, curve sweeps;
//! - [`control`]: gain derivation from inertia/droop/damping plus
//!   continuous and trapezoidal-discrete controller realizations;
//! - [`scenario`]: closed-form infinite-bus signals built from event
//!   lists (frequency ramps, phase jumps, voltage dips, setpoint steps);
//! - [`simulator`]: fixed-step RK4 of the closed loop with
//!   loss-of-synchronism detection;
//! - [`analysis`]: stability margins (maximum phase jump, maximum ramp
//!   rate, critical clearing time) both from curve geometry and from
//!   simulation bisection, plus equal-area diagnostics;
//! - [`config`] and [`cli`]: the scenario file format and the `gfcsim`
//!   command-line front end.
//!
//! Start with the runnable examples (`cargo run --example
//! power_angle_curves`, `current_limiter`, `rocof_event`,
//! `phase_jump_event`, `voltage_dip_event`, `stability_margins`,
//! `equal_area`, `discrete_controller`) or the `gfcsim` binary.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod control;
pub mod defaults;
pub mod electrical;
pub mod error;
pub mod scenario;
pub mod simulator;
pub mod types;

pub use analysis::{Bound, Cct, EacAreas, MarginReport};
pub use electrical::{CurveEvaluator, OperatingPoint, PowerAngleCurve};
pub use error::{Error, Result};
pub use scenario::{Event, GridPoint, GridSignal};
pub use simulator::{SimConfig, Trajectory, Verdict};
pub use types::{DqVector, FeedbackMode, GfcParams, NetworkParams, PerUnitBase};
