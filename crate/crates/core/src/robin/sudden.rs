//! Sudden change between two static Robin bases on the same `L_cav`.
//!
//! With `Δk = k'_m − k_n`, `Σk = k'_m + k_n` and likewise for the phases, the
//! two overlap integrals are
//!
//! ```text
//! F∓ = ∫₀ᴸ cos((k' ∓ k)x + δ' ∓ δ) dx = L cos(δ' ∓ δ + (k' ∓ k)L/2) sinc((k' ∓ k)L/2)
//! α_mn = N'_m N_n Σk (F₋ − F₊)/2,   β_mn = −N'_m N_n Δk (F₋ − F₊)/2
//! ```
//!
//! This is the usual closed form with the `(sin(a + ΔkL) − sin a)/Δk`
//! quotient rewritten as a product, so the diagonal `k'_m → k_n` needs no
//! special casing beyond a series for `sinc`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ModeBasis;
use crate::bogoliubov::BogoliubovTransform;
use crate::error::{Error, Result};

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// Real coefficient matrices `(α, β)` of the sudden change `old → new`.
pub fn sudden_coefficients(old: &ModeBasis, new: &ModeBasis) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if old.n_modes() != new.n_modes() {
        return Err(Error::DimensionMismatch {
            left: old.n_modes(),
            right: new.n_modes(),
        });
    }
    if old.l_cav != new.l_cav {
        return Err(Error::param(
            "L_cav",
            format!(
                "sudden change needs a common cavity, got {} and {}",
                old.l_cav, new.l_cav
            ),
        ));
    }
    let n = old.n_modes();
    let l = old.l_cav;
    let mut alpha = DMatrix::zeros(n, n);
    let mut beta = DMatrix::zeros(n, n);
    for m in 0..n {
        let (kp, dp, np) = (new.k[m], new.delta[m], new.norm[m]);
        for j in 0..n {
            let (k, d, nn) = (old.k[j], old.delta[j], old.norm[j]);
            let (dk, sk) = (kp - k, kp + k);
            let f_minus = l * ((dp - d) + 0.5 * dk * l).cos() * sinc(0.5 * dk * l);
            let f_plus = l * ((dp + d) + 0.5 * sk * l).cos() * sinc(0.5 * sk * l);
            let overlap = 0.5 * np * nn * (f_minus - f_plus);
            alpha[(m, j)] = sk * overlap;
            beta[(m, j)] = -dk * overlap;
        }
    }
    Ok((alpha, beta))
}

/// Bogoliubov transform of the sudden change `old → new`.
pub fn instantaneous_bogoliubov(old: &ModeBasis, new: &ModeBasis) -> Result<BogoliubovTransform> {
    let (a, b) = sudden_coefficients(old, new)?;
    BogoliubovTransform::new(a.map(|x| Complex64::new(x, 0.0)), b.map(|x| Complex64::new(x, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov::max_abs;
    use crate::quadrature::{kg_inner_product, Conjugate, RobinMode};
    use approx::assert_abs_diff_eq;

    #[test]
    fn unchanged_basis_is_identity() {
        let b = ModeBasis::solve(0.01, 2e-4, 7e-4, 12).unwrap();
        let t = instantaneous_bogoliubov(&b, &b).unwrap();
        assert!(max_abs(&(t.alpha() - DMatrix::identity(12, 12))) < 1e-13);
        assert!(max_abs(t.beta()) < 1e-13);
    }

    #[test]
    fn particle_creation_is_linear_in_a_small_jump() {
        let l = 1.0;
        let b0 = ModeBasis::solve(l, 0.05, 0.02, 10).unwrap();
        let beta = |dd: f64| {
            let b1 = ModeBasis::solve(l, 0.05 + dd, 0.02, 10).unwrap();
            max_abs(instantaneous_bogoliubov(&b0, &b1).unwrap().beta())
        };
        let slope = (beta(1e-4) / beta(1e-5)).log10();
        assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn matches_quadrature_overlaps() {
        let (l, c) = (1.0, 1.0);
        let old = ModeBasis::solve(l, 0.05, 0.03, 12).unwrap();
        let new = ModeBasis::solve(l, 0.02, 0.06, 12).unwrap();
        let t = instantaneous_bogoliubov(&old, &new).unwrap();
        let mode = |b: &ModeBasis, i: usize| RobinMode {
            k: b.k[i],
            delta: b.delta[i],
            norm: b.norm[i],
            l_cav: l,
            c,
        };
        for m in 0..12 {
            for n in 0..12 {
                let v = mode(&new, m);
                let u = mode(&old, n);
                let a = kg_inner_product(&v, &u, c, 1e-13).unwrap();
                let b = -kg_inner_product(&v, &Conjugate(&u), c, 1e-13).unwrap();
                assert_abs_diff_eq!(a.re, t.alpha()[(m, n)].re, epsilon = 1e-9);
                assert_abs_diff_eq!(b.re, t.beta()[(m, n)].re, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn sinc_series_is_continuous() {
        for x in [9.9e-5, 1e-4, 1.01e-4] {
            assert_abs_diff_eq!(sinc(x), x.sin() / x, epsilon = 1e-15);
        }
        assert_eq!(sinc(0.0), 1.0);
    }

    #[test]
    fn rejects_mismatched_cavities() {
        let a = ModeBasis::solve(1.0, 0.1, 0.1, 3).unwrap();
        let b = ModeBasis::solve(1.1, 0.1, 0.1, 3).unwrap();
        let c = ModeBasis::solve(1.0, 0.1, 0.1, 4).unwrap();
        assert!(instantaneous_bogoliubov(&a, &b).is_err());
        assert!(instantaneous_bogoliubov(&a, &c).is_err());
    }
}
