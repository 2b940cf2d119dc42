//! Flux-biased SQUID termination modelled as an extra effective length
//! `δL_eff(Φ) = (Φ0/2π) / (2 L0 Ic |cos(πΦ/Φ0)|)`.

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Effective length added by a SQUID threaded by flux `flux` (Wb).
pub fn delta_l_eff(flux: f64, k: &PhysicalConstants) -> Result<f64> {
    let cos = (std::f64::consts::PI * flux / k.phi0).cos().abs();
    if !(cos > 1e-12) {
        return Err(Error::FluxDivergence { flux });
    }
    Ok(k.min_effective_length() / cos)
}

/// Inverse of [`delta_l_eff`] on `[0, Φ0/2)`.
///
/// `cos θ = m/target` is solved as `θ = atan2(√((target − m)(target + m)), m)`
/// so that targets just above the minimum `m` keep full relative accuracy.
pub fn flux_for_length(target: f64, k: &PhysicalConstants) -> Result<f64> {
    let m = k.min_effective_length();
    if !(target.is_finite() && target >= m * (1.0 - 1e-14)) {
        return Err(Error::UnreachableLength { target, minimum: m });
    }
    let gap = (target - m).max(0.0);
    let theta = (gap * (target + m)).sqrt().atan2(m);
    Ok(k.phi0 * theta / std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn minimum_length_at_zero_flux() {
        let k = PhysicalConstants::default();
        let l = delta_l_eff(0.0, &k).unwrap();
        assert!((l - 0.75e-3).abs() / 0.75e-3 < 0.01);
        assert_eq!(flux_for_length(l, &k).unwrap(), 0.0);
    }

    #[test]
    fn third_of_a_flux_quantum_doubles_the_length() {
        let k = PhysicalConstants::default();
        let m = k.min_effective_length();
        assert_relative_eq!(delta_l_eff(k.phi0 / 3.0, &k).unwrap(), 2.0 * m, max_relative = 1e-14);
        assert_relative_eq!(
            flux_for_length(2.0 * m, &k).unwrap(),
            k.phi0 / 3.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn even_and_periodic() {
        let k = PhysicalConstants::default();
        let f = 0.17 * k.phi0;
        let l = delta_l_eff(f, &k).unwrap();
        assert_relative_eq!(delta_l_eff(-f, &k).unwrap(), l, max_relative = 1e-14);
        assert_relative_eq!(delta_l_eff(f + k.phi0, &k).unwrap(), l, max_relative = 1e-12);
    }

    #[test]
    fn divergence_and_unreachable() {
        let k = PhysicalConstants::default();
        assert!(matches!(
            delta_l_eff(k.phi0 / 2.0, &k),
            Err(Error::FluxDivergence { .. })
        ));
        assert!(matches!(
            flux_for_length(0.5 * k.min_effective_length(), &k),
            Err(Error::UnreachableLength { .. })
        ));
    }

    #[test]
    fn round_trip() {
        let k = PhysicalConstants::default().with_min_length(7.5e-6).unwrap();
        for i in 0..=49 {
            let f = i as f64 * 0.01 * k.phi0;
            let back = flux_for_length(delta_l_eff(f, &k).unwrap(), &k).unwrap();
            assert!((back - f).abs() <= 1e-12 * f, "{i}: {back} vs {f}");
        }
    }
}
