//! Per-unit conventions, dq vector arithmetic, and the parameter records
//! shared by the rest of the crate.
//!
//! Everything downstream works in per-unit on a peak-value phase base: with
//! voltages and currents expressed as peak-of-phase quantities, apparent
//! power is `(3/2)·V_peak·I_peak`, so the 3/2 factor cancels out of every
//! power expression and the quasi-static relations keep their bare pu form.
//! SI conversions only happen at I/O boundaries.
//!
//! Angles are radians internally (degrees at the CLI boundary only). The
//! rotor angle `delta = theta_vsc - theta_g` is never wrapped, so a pole
//! slip shows up as monotone growth.

use crate::error::{Error, Result};

/// Which power signal closes the synchronization loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackMode {
    /// Feed back the measured (saturated) active power at the PCC.
    MeasuredPower,
    /// Feed back the virtual power computed from the unsaturated current
    /// references, which stays sensitive to the rotor angle under limiting.
    VirtualPower,
}

impl FeedbackMode {
    pub const BOTH: [FeedbackMode; 2] = [FeedbackMode::MeasuredPower, FeedbackMode::VirtualPower];

    pub fn label(self) -> &'static str {
        match self {
            FeedbackMode::MeasuredPower => "measured",
            FeedbackMode::VirtualPower => "virtual",
        }
    }
}

/// Per-unit base quantities. Voltage is peak-of-phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerUnitBase {
    /// Apparent power base, VA.
    pub s_base: f64,
    /// Voltage base, V peak-of-phase.
    pub v_base: f64,
    /// Frequency base, Hz.
    pub f_base: f64,
    /// Angular frequency base, rad/s. Always exactly `2*pi*f_base`.
    pub omega_base: f64,
}

impl PerUnitBase {
    pub fn new(s_base: f64, v_base: f64, f_base: f64) -> Result<Self> {
        let all_positive = [s_base, v_base, f_base]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !all_positive {
            return Err(Error::InvalidParameter(format!(
                "per-unit base must be strictly positive (s = {s_base}, v = {v_base}, f = {f_base})"
            )));
        }
        Ok(Self {
            s_base,
            v_base,
            f_base,
            omega_base: 2.0 * std::f64::consts::PI * f_base,
        })
    }

    /// Current base, A peak-of-phase: `2*S / (3*V_peak)`.
    pub fn i_base(&self) -> f64 {
        2.0 * self.s_base / (3.0 * self.v_base)
    }

    pub fn power_to_si(&self, pu: f64) -> f64 {
        pu * self.s_base
    }

    pub fn power_to_pu(&self, si: f64) -> f64 {
        si / self.s_base
    }

    pub fn voltage_to_si(&self, pu: f64) -> f64 {
        pu * self.v_base
    }

    pub fn voltage_to_pu(&self, si: f64) -> f64 {
        si / self.v_base
    }

    pub fn current_to_si(&self, pu: f64) -> f64 {
        pu * self.i_base()
    }

    pub fn current_to_pu(&self, si: f64) -> f64 {
        si / self.i_base()
    }

    pub fn frequency_to_si(&self, pu: f64) -> f64 {
        pu * self.f_base
    }

    pub fn frequency_to_pu(&self, hz: f64) -> f64 {
        hz / self.f_base
    }
}

/// A vector in the synchronously rotating dq frame defined by the
/// converter's virtual rotor angle.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DqVector {
    pub d: f64,
    pub q: f64,
}

impl DqVector {
    pub fn new(d: f64, q: f64) -> Self {
        Self { d, q }
    }

    pub fn magnitude(self) -> f64 {
        self.d.hypot(self.q)
    }

    pub fn scale(self, factor: f64) -> Self {
        Self {
            d: self.d * factor,
            q: self.q * factor,
        }
    }
}

/// Chord length between two voltage phasors of magnitudes `e` and `vg`
/// separated by angle `delta`: `sqrt(vg^2 + e^2 - 2*vg*e*cos(delta))`.
///
/// For `e == vg` this reduces to `2*e*|sin(delta/2)|`.
pub fn chord_length(e: f64, vg: f64, delta: f64) -> f64 {
    debug_assert!(e >= 0.0 && vg >= 0.0);
    (vg * vg + e * e - 2.0 * vg * e * delta.cos())
        .max(0.0)
        .sqrt()
}

/// Grid-forming converter parameters: controller tuning inputs, virtual
/// impedance, current limit, and setpoints. Controller gains derive from
/// these on demand (see [`crate::control::derive_gains`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfcParams {
    /// Virtual inertia constant, s.
    pub h_inertia: f64,
    /// Damping coefficient, dimensionless.
    pub zeta: f64,
    /// Frequency droop, pu (0 disables droop).
    pub r_droop: f64,
    /// Virtual resistance, pu. Carried in the dq current computation but
    /// neglected in the power-angle algebra, where only reactances matter.
    pub r_v: f64,
    /// Virtual reactance, pu.
    pub x_v: f64,
    /// Peak current limit, pu.
    pub i_lim: f64,
    /// Internal voltage magnitude, pu.
    pub e_mag: f64,
    /// Active power setpoint, pu.
    pub p_set: f64,
    /// Synchronization feedback selection.
    pub feedback_mode: FeedbackMode,
}

impl GfcParams {
    pub fn validate(&self) -> Result<()> {
        if !self.h_inertia.is_finite() || self.h_inertia <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "h_inertia must be > 0, got {}",
                self.h_inertia
            )));
        }
        if !self.i_lim.is_finite() || self.i_lim <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "i_lim must be > 0, got {}",
                self.i_lim
            )));
        }
        if !self.e_mag.is_finite() || self.e_mag <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "e_mag must be > 0, got {}",
                self.e_mag
            )));
        }
        if !self.x_v.is_finite() || self.x_v <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "x_v must be > 0, got {}",
                self.x_v
            )));
        }
        if self.r_v < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "r_v must be >= 0, got {}",
                self.r_v
            )));
        }
        if self.r_v > 0.0 && self.x_v / self.r_v < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "virtual impedance must be predominantly inductive: x_v/r_v = {:.3} < 1",
                self.x_v / self.r_v
            )));
        }
        if self.r_droop < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "r_droop must be >= 0, got {}",
                self.r_droop
            )));
        }
        Ok(())
    }
}

/// External network parameters between the converter terminal and the
/// infinite bus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// Transformer reactance, pu.
    pub x_tf: f64,
    /// Grid (Thevenin) reactance, pu.
    pub x_g: f64,
    /// Infinite-bus voltage magnitude, pu.
    pub vg_nominal: f64,
}

impl NetworkParams {
    /// Grid-side reactance external to the converter's virtual impedance.
    pub fn x_ext(&self) -> f64 {
        self.x_tf + self.x_g
    }

    /// Total reactance between internal voltage and infinite bus.
    pub fn x_total(&self, x_v: f64) -> f64 {
        x_v + self.x_ext()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.x_ext().is_finite() || self.x_ext() <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "external reactance x_tf + x_g must be > 0, got {}",
                self.x_ext()
            )));
        }
        if !self.vg_nominal.is_finite() || self.vg_nominal <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "vg_nominal must be > 0, got {}",
                self.vg_nominal
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn magnitude_basics() {
        assert_eq!(DqVector::new(1.0, 0.0).magnitude(), 1.0);
        assert_eq!(DqVector::new(0.0, 0.0).magnitude(), 0.0);
        assert_eq!(DqVector::new(3.0, 4.0).magnitude(), 5.0);
    }

    #[test]
    fn chord_length_basics() {
        assert_eq!(chord_length(1.0, 1.0, 0.0), 0.0);
        assert!((chord_length(1.0, 1.0, PI) - 2.0).abs() < 1e-15);
        // equilateral: 2*sin(30 deg) = 1
        assert!((chord_length(1.0, 1.0, PI / 3.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chord_length_symmetry() {
        for &delta in &[0.1, 0.7, 2.9] {
            assert_eq!(chord_length(0.8, 1.1, delta), chord_length(1.1, 0.8, delta));
            assert_eq!(
                chord_length(0.8, 1.1, delta),
                chord_length(0.8, 1.1, -delta)
            );
        }
    }

    #[test]
    fn chord_identity_equal_magnitudes() {
        // M_v(delta) = 2*E*|sin(delta/2)| when both magnitudes are E
        let e = 0.93;
        let mut delta = -2.0 * PI;
        while delta <= 2.0 * PI {
            let expect = 2.0 * e * (delta / 2.0).sin().abs();
            assert!(
                (chord_length(e, e, delta) - expect).abs() < 1e-12,
                "delta = {delta}"
            );
            delta += 0.01;
        }
    }

    #[test]
    fn per_unit_base_omega() {
        let base = PerUnitBase::new(100e6, 12.3e3, 50.0).unwrap();
        assert_eq!(base.omega_base, 2.0 * PI * 50.0);
        assert!(PerUnitBase::new(-1.0, 1.0, 50.0).is_err());
        assert!(PerUnitBase::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn per_unit_round_trips() {
        let base = PerUnitBase::new(100e6, 12.3e3, 50.0).unwrap();
        for &x in &[0.0, 1.0, 0.37, -2.5, 1e3] {
            let through = base.power_to_pu(base.power_to_si(x));
            assert!((through - x).abs() <= 1e-12 * x.abs().max(1.0));
            let through = base.voltage_to_pu(base.voltage_to_si(x));
            assert!((through - x).abs() <= 1e-12 * x.abs().max(1.0));
            let through = base.current_to_pu(base.current_to_si(x));
            assert!((through - x).abs() <= 1e-12 * x.abs().max(1.0));
            let through = base.frequency_to_pu(base.frequency_to_si(x));
            assert!((through - x).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn params_validation() {
        let mut p = crate::defaults::gfc_params();
        assert!(p.validate().is_ok());
        p.x_v = 0.0;
        assert!(p.validate().is_err());
        p.x_v = 0.3;
        p.r_v = 0.5; // x/r below 1
        assert!(p.validate().is_err());

        let mut n = crate::defaults::network_params();
        assert!(n.validate().is_ok());
        n.x_tf = 0.0;
        n.x_g = 0.0;
        assert!(n.validate().is_err());
    }
}
