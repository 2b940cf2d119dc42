use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wave speed in the superconducting waveguide, chosen so that the
/// pair-creation resonance `L = 2 c t_a` sits at 2.38 cm for `t_a = 0.1 ns`.
pub const DEFAULT_C: f64 = 1.19e8;
pub const FLUX_QUANTUM: f64 = 2.067_833_848e-15;
pub const DEFAULT_L0: f64 = 0.44e-6;
pub const DEFAULT_IC: f64 = 0.5e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Wave speed (m/s).
    pub c: f64,
    /// Magnetic flux quantum (Wb).
    pub phi0: f64,
    /// Inductance per unit length (H/m).
    pub l0: f64,
    /// Junction critical current (A).
    pub ic: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            c: DEFAULT_C,
            phi0: FLUX_QUANTUM,
            l0: DEFAULT_L0,
            ic: DEFAULT_IC,
        }
    }
}

impl PhysicalConstants {
    pub fn new(c: f64, phi0: f64, l0: f64, ic: f64) -> Result<Self> {
        let k = Self { c, phi0, l0, ic };
        k.validate()?;
        Ok(k)
    }

    pub fn with_c(mut self, c: f64) -> Result<Self> {
        self.c = c;
        self.validate()?;
        Ok(self)
    }

    /// Same waveguide, but with the critical current chosen so that the
    /// zero-flux effective length equals `dl_min`.
    pub fn with_min_length(mut self, dl_min: f64) -> Result<Self> {
        if !(dl_min.is_finite() && dl_min > 0.0) {
            return Err(Error::param("delta_l_min", format!("must be > 0, got {dl_min}")));
        }
        self.ic = self.phi0 / (2.0 * std::f64::consts::PI) / (2.0 * self.l0 * dl_min);
        self.validate()?;
        Ok(self)
    }

    /// Smallest reachable SQUID effective length, δL_eff(Φ = 0).
    pub fn min_effective_length(&self) -> f64 {
        self.phi0 / (2.0 * std::f64::consts::PI) / (2.0 * self.l0 * self.ic)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c", self.c), ("phi0", self.phi0), ("l0", self.l0), ("ic", self.ic)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_min_length_is_three_quarters_of_a_millimetre() {
        let k = PhysicalConstants::default();
        assert_relative_eq!(k.min_effective_length(), 0.748e-3, max_relative = 1e-3);
    }

    #[test]
    fn min_length_round_trips() {
        let k = PhysicalConstants::default().with_min_length(7.5e-6).unwrap();
        assert_relative_eq!(k.min_effective_length(), 7.5e-6, max_relative = 1e-14);
        assert_eq!(k.l0, DEFAULT_L0);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(PhysicalConstants::new(0.0, FLUX_QUANTUM, DEFAULT_L0, DEFAULT_IC).is_err());
        assert!(PhysicalConstants::default().with_c(f64::NAN).is_err());
        assert!(PhysicalConstants::default().with_min_length(-1.0).is_err());
    }
}
