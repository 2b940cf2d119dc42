//! Truncated Bogoliubov transformations.
//!
//! Convention: the new annihilation operators are `b = α* a − β* a†`
//! (elementwise conjugates, matrix products over mode indices). With that
//! choice `(α, β)` transforms compose as
//!
//! ```text
//! first = (α, β), second = (A, B)  ⇒  (Aα + Bβ*, Aβ + Bα*)
//! ```
//!
//! and the exact identities are `αα† − ββ† = I`, `αβᵀ − βαᵀ = 0`.
//!
//! A truncated transform can only satisfy the identities approximately: the
//! highest retained modes couple to the discarded ones. Defects are therefore
//! measured on the leading ⌈N/2⌉ × ⌈N/2⌉ block, which is the part that
//! converges as N grows and the part the clock mode lives in.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default identity tolerance for an `n`-mode transform.
pub fn default_tolerance(n: usize) -> f64 {
    1e-8 * n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Defects {
    /// max |αα† − ββ† − I|
    pub unitarity: f64,
    /// max |αβᵀ − βαᵀ|
    pub symplectic: f64,
}

impl Defects {
    pub fn max(&self) -> f64 {
        self.unitarity.max(self.symplectic)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovTransform {
    alpha: CMatrix,
    beta: CMatrix,
    physical: bool,
}

impl BogoliubovTransform {
    pub fn identity(n: usize) -> Self {
        Self {
            alpha: CMatrix::identity(n, n),
            beta: CMatrix::zeros(n, n),
            physical: true,
        }
    }

    /// Wraps a coefficient pair without checking the identities; shapes are
    /// still validated.
    pub fn new(alpha: CMatrix, beta: CMatrix) -> Result<Self> {
        let n = alpha.nrows();
        if alpha.ncols() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: alpha.ncols(),
            });
        }
        if beta.nrows() != n || beta.ncols() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: beta.nrows().max(beta.ncols()),
            });
        }
        Ok(Self {
            alpha,
            beta,
            physical: true,
        })
    }

    /// Like [`new`](Self::new) but rejects pairs whose identity defect
    /// exceeds `tolerance`.
    pub fn checked(alpha: CMatrix, beta: CMatrix, tolerance: f64) -> Result<Self> {
        let t = Self::new(alpha, beta)?;
        t.check_identities(tolerance)?;
        Ok(t)
    }

    /// Exact transform generated by a quadratic form: the exponential of
    /// `[[iH, K], [K*, −iH*]]` with `H` Hermitian and `K` symmetric. Every
    /// such transform satisfies the Bogoliubov identities to rounding.
    pub fn from_generator(h: &CMatrix, k: &CMatrix) -> Result<Self> {
        let n = h.nrows();
        if h.ncols() != n || k.nrows() != n || k.ncols() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: k.nrows(),
            });
        }
        let scale = max_abs(h).max(max_abs(k)).max(1.0);
        if max_abs(&(h - h.adjoint())) > 1e-12 * scale || max_abs(&(k - k.transpose())) > 1e-12 * scale {
            return Err(Error::param("generator", "H must be Hermitian and K symmetric"));
        }
        let i = Complex64::new(0.0, 1.0);
        let mut x = CMatrix::zeros(2 * n, 2 * n);
        x.view_mut((0, 0), (n, n)).copy_from(&h.map(|z| i * z));
        x.view_mut((0, n), (n, n)).copy_from(k);
        x.view_mut((n, 0), (n, n)).copy_from(&k.map(|z| z.conj()));
        x.view_mut((n, n), (n, n)).copy_from(&h.map(|z| -i * z.conj()));
        let m = x.exp();
        let alpha = m.view((0, 0), (n, n)).map(|z| z.conj());
        let beta = m.view((0, n), (n, n)).map(|z| -z.conj());
        Self::new(alpha, beta)
    }

    /// Diagonal phase evolution `α = diag(e^{iω_n t})`, i.e. `b_n = e^{−iω_n t} a_n`.
    pub fn free_evolution(frequencies: &[f64], duration: f64) -> Self {
        let n = frequencies.len();
        let diag =
            nalgebra::DVector::from_iterator(n, frequencies.iter().map(|w| Complex64::from_polar(1.0, w * duration)));
        Self {
            alpha: CMatrix::from_diagonal(&diag),
            beta: CMatrix::zeros(n, n),
            physical: true,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.alpha.nrows()
    }

    pub fn alpha(&self) -> &CMatrix {
        &self.alpha
    }

    pub fn beta(&self) -> &CMatrix {
        &self.beta
    }

    pub fn into_parts(self) -> (CMatrix, CMatrix) {
        (self.alpha, self.beta)
    }

    /// `false` once particle-creation coefficients have been removed by hand.
    pub fn is_physical(&self) -> bool {
        self.physical
    }

    /// Identity defects over the leading ⌈N/2⌉ modes.
    pub fn defects(&self) -> Defects {
        let n = self.n_modes();
        self.block_defects(n.div_ceil(2))
    }

    /// Identity defects over the full truncated matrices.
    pub fn full_defects(&self) -> Defects {
        self.block_defects(self.n_modes())
    }

    fn block_defects(&self, m: usize) -> Defects {
        if m == 0 {
            return Defects {
                unitarity: 0.0,
                symplectic: 0.0,
            };
        }
        let a = self.alpha.rows(0, m);
        let b = self.beta.rows(0, m);
        let mut u = a * a.adjoint() - b * b.adjoint();
        for i in 0..m {
            u[(i, i)] -= ONE;
        }
        let s = a * b.transpose() - b * a.transpose();
        Defects {
            unitarity: max_abs(&u),
            symplectic: max_abs(&s),
        }
    }

    pub fn check_identities(&self, tolerance: f64) -> Result<Defects> {
        let d = self.defects();
        if !(d.max() <= tolerance) {
            return Err(Error::IdentityViolation {
                unitarity: d.unitarity,
                symplectic: d.symplectic,
                tolerance,
            });
        }
        Ok(d)
    }

    /// `self` followed by `second`, verified against the default tolerance
    /// (skipped when either factor is flagged non-physical).
    pub fn compose(&self, second: &Self) -> Result<Self> {
        let t = self.compose_unchecked(second)?;
        if t.physical {
            t.check_identities(default_tolerance(t.n_modes()))?;
        }
        Ok(t)
    }

    /// `self` followed by `second` without the identity check.
    pub fn compose_unchecked(&self, second: &Self) -> Result<Self> {
        if self.n_modes() != second.n_modes() {
            return Err(Error::DimensionMismatch {
                left: self.n_modes(),
                right: second.n_modes(),
            });
        }
        let (a, b) = (&self.alpha, &self.beta);
        let (sa, sb) = (&second.alpha, &second.beta);
        let alpha = sa * a + sb * b.map(|z| z.conj());
        let beta = sa * b + sb * a.map(|z| z.conj());
        Ok(Self {
            alpha,
            beta,
            physical: self.physical && second.physical,
        })
    }

    /// Symplectic inverse `(α†, −βᵀ)`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.physical {
            return Err(Error::param(
                "transform",
                "a transform without particle-creation terms has no Bogoliubov inverse",
            ));
        }
        // Generous bound: only reject input that is clearly not a
        // Bogoliubov transform at all.
        self.check_identities(1e-4_f64.max(default_tolerance(self.n_modes())))?;
        Ok(self.inverse_unchecked())
    }

    pub fn inverse_unchecked(&self) -> Self {
        Self {
            alpha: self.alpha.adjoint(),
            beta: -self.beta.transpose(),
            physical: self.physical,
        }
    }

    /// Returns `(α, 0)`; the result is flagged non-physical.
    pub fn strip_particle_creation(&self) -> Self {
        let n = self.n_modes();
        let physical = self.physical && self.beta.iter().all(|z| *z == ZERO);
        Self {
            alpha: self.alpha.clone(),
            beta: CMatrix::zeros(n, n),
            physical,
        }
    }

    /// Conjugation by the mirror parity `P = diag((−1)^{n+1})`.
    pub fn parity_conjugate(&self) -> Self {
        let flip = |m: &CMatrix| {
            CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
                if (i + j) % 2 == 0 {
                    m[(i, j)]
                } else {
                    -m[(i, j)]
                }
            })
        };
        Self {
            alpha: flip(&self.alpha),
            beta: flip(&self.beta),
            physical: self.physical,
        }
    }

    /// `count`-fold self-composition by repeated squaring.
    pub fn power(&self, count: u64) -> Self {
        let mut result = Self::identity(self.n_modes());
        result.physical = self.physical;
        let mut base = self.clone();
        let mut k = count;
        while k > 0 {
            if k & 1 == 1 {
                result = result.compose_unchecked(&base).expect("same dimension");
            }
            k >>= 1;
            if k > 0 {
                base = base.compose_unchecked(&base).expect("same dimension");
            }
        }
        result
    }

    /// `α_11 − β_11`, the amplitude whose argument is the clock phase.
    pub fn clock_amplitude(&self) -> Complex64 {
        self.alpha[(0, 0)] - self.beta[(0, 0)]
    }

    /// Clock-mode phase `atan2(−Im z, Re z)` with `z = α_11 − β_11`.
    pub fn clock_phase(&self) -> Result<f64> {
        clock_phase_of(self.clock_amplitude())
    }

    /// Clock phase relative to a static reference mode of frequency
    /// `omega_ref` over `elapsed` lab time.
    pub fn relative_phase(&self, omega_ref: f64, elapsed: f64) -> Result<PhaseRecord> {
        PhaseRecord::from_amplitude(self.clock_amplitude(), omega_ref, elapsed)
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn clock_phase_of(z: Complex64) -> Result<f64> {
    if !(z.norm() > 1e-300) {
        return Err(Error::UndefinedPhase);
    }
    Ok((-z.im).atan2(z.re))
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    let r = x - tau * (x / tau).round();
    if r <= -std::f64::consts::PI {
        r + tau
    } else {
        r
    }
}

/// Picks the 2π-branch of `x` nearest to `reference` (continuity tracking).
pub fn unwrap_near(x: f64, reference: f64) -> f64 {
    reference + wrap_angle(x - reference)
}

/// Unwraps a sequence of phases by continuity, starting from the branch of
/// the first entry nearest to `seed`.
pub fn unwrap_sequence(phases: &[f64], seed: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(phases.len());
    let mut prev = seed;
    for &p in phases {
        let u = unwrap_near(p, prev);
        out.push(u);
        prev = u;
    }
    out
}

/// Clock phase of an evolution together with the static-cavity reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseRecord {
    theta_rel: f64,
    theta_static: f64,
}

impl PhaseRecord {
    pub fn new(theta_raw: f64, theta_static: f64) -> Self {
        Self {
            theta_rel: theta_raw - theta_static,
            theta_static,
        }
    }

    /// The static reference phase is `−ω_ref·elapsed`; the relative phase is
    /// evaluated as `−arg(z e^{iθ_static})` so no large angles are subtracted.
    pub fn from_amplitude(z: Complex64, omega_ref: f64, elapsed: f64) -> Result<Self> {
        let theta_static = -omega_ref * elapsed;
        let rel = clock_phase_of(z * Complex64::from_polar(1.0, theta_static))?;
        Ok(Self {
            theta_rel: rel,
            theta_static,
        })
    }

    /// Moves the relative phase to the 2π-branch nearest `reference`.
    pub fn unwrapped_near(self, reference: f64) -> Self {
        Self {
            theta_rel: unwrap_near(self.theta_rel, reference),
            ..self
        }
    }

    pub fn theta_raw(&self) -> f64 {
        self.theta_rel + self.theta_static
    }

    pub fn theta_static(&self) -> f64 {
        self.theta_static
    }

    pub fn theta_rel(&self) -> f64 {
        self.theta_rel
    }

    pub fn theta_rel_degrees(&self) -> f64 {
        self.theta_rel.to_degrees()
    }
}
