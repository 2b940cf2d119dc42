//! Dirichlet cavity transformations between the inertial and the uniformly
//! accelerated mode bases, and their composition over a round trip.
//!
//! In units of the proper length the basis change only depends on `h`.
//! Writing `y ∈ [0, 1]` for the lab coordinate and `u ∈ [0, 1]` for the
//! Rindler coordinate across the cavity on the common slice,
//!
//! ```text
//! u(y) = ln(1 + h y/g₋)/κ,   y(u) = g₋ (e^{κu} − 1)/h,   κ = 2 atanh(h/2)
//! J1_mn = ∫ sin(πm u(y)) sin(πn y) dy,   J2_mn = ∫ sin(πm u) sin(πn y(u)) du
//! α_mn = (n J1 + m J2)/√(mn),   β_mn = (n J1 − m J2)/√(mn)
//! ```
//!
//! which is the Klein–Gordon overlap with the redshift factor and the chart
//! Jacobian folded together: the inertial-frequency half of the integrand is
//! integrated in `y`, the Rindler-frequency half in `u`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bogoliubov::{BogoliubovTransform, PhaseRecord};
use crate::error::{Error, Result};
use crate::quadrature::{unit_rule, MAX_NODES};
use crate::trajectory::{atanhc, one_minus_asinhc, Orientation, TrajectoryPlan};

/// Absolute convergence target for each matrix element.
pub const SEGMENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletBasis {
    pub length: f64,
    pub n_modes: usize,
    pub c: f64,
}

impl DirichletBasis {
    pub fn frequencies(&self) -> Vec<f64> {
        dirichlet_frequencies(self.length, self.c, self.n_modes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RindlerBasis {
    pub l_prime: f64,
    pub h: f64,
    pub n_modes: usize,
    pub c: f64,
}

impl RindlerBasis {
    pub fn for_plan(plan: &TrajectoryPlan, n_modes: usize) -> Result<Self> {
        Ok(Self {
            l_prime: plan.rindler_length()?,
            h: plan.h(),
            n_modes,
            c: plan.c(),
        })
    }

    /// `Ω_m = πmc/L'`, conjugate to Rindler time.
    pub fn frequencies(&self) -> Vec<f64> {
        dirichlet_frequencies(self.l_prime, self.c, self.n_modes)
    }
}

pub fn dirichlet_frequencies(length: f64, c: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| std::f64::consts::PI * k as f64 * c / length).collect()
}

type SegmentCache = RwLock<HashMap<(u64, usize), Arc<BogoliubovTransform>>>;

fn segment_cache() -> &'static SegmentCache {
    static CACHE: OnceLock<SegmentCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Inertial → accelerated (towards +x) basis change for rigidity `h`.
/// Results are cached by `(h, N)`.
pub fn segment_transform(h: f64, n_modes: usize) -> Result<Arc<BogoliubovTransform>> {
    if !(0.0..2.0).contains(&h) {
        return Err(Error::InvalidRigidity { h });
    }
    if n_modes == 0 {
        return Err(Error::param("n_modes", "must be at least 1"));
    }
    let key = (h.to_bits(), n_modes);
    if let Some(t) = segment_cache().read().expect("segment cache poisoned").get(&key) {
        return Ok(t.clone());
    }
    let t = Arc::new(compute_segment(h, n_modes)?);
    segment_cache()
        .write()
        .expect("segment cache poisoned")
        .entry(key)
        .or_insert_with(|| t.clone());
    Ok(t)
}

/// The basis change for a segment of the given orientation. A reversed
/// wedge swaps the mirrors, which acts on the modes as the parity `(−1)^{n+1}`.
pub fn oriented_segment(h: f64, n_modes: usize, orientation: Orientation) -> Result<BogoliubovTransform> {
    let s = segment_transform(h, n_modes)?;
    Ok(match orientation {
        Orientation::Forward => (*s).clone(),
        Orientation::Reversed => s.parity_conjugate(),
    })
}

fn overlap_matrices(h: f64, n: usize, nodes: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let pi = std::f64::consts::PI;
    let gm = 1.0 - h / 2.0;
    let kappa = 2.0 * (h / 2.0).atanh();
    let rule = unit_rule(nodes);
    let (x, w) = (&rule.0, &rule.1);
    let q = x.len();
    // Table rows: mode index; columns: quadrature node (weights folded into one side).
    let table = |f: &dyn Fn(f64) -> f64, weighted: bool| {
        DMatrix::from_fn(n, q, |m, j| {
            let s = (pi * (m + 1) as f64 * f(x[j])).sin();
            if weighted {
                s * w[j]
            } else {
                s
            }
        })
    };
    let u_of_y = |y: f64| (h * y / gm).ln_1p() / kappa;
    let y_of_u = |u: f64| gm * (kappa * u).exp_m1() / h;
    let j1 = table(&u_of_y, true) * table(&|y| y, false).transpose();
    let j2 = table(&|u| u, true) * table(&y_of_u, false).transpose();
    (j1, j2)
}

fn compute_segment(h: f64, n: usize) -> Result<BogoliubovTransform> {
    if h == 0.0 {
        return Ok(BogoliubovTransform::identity(n));
    }
    let mut nodes = (2 * n + 32).next_power_of_two();
    let (mut j1, mut j2) = overlap_matrices(h, n, nodes);
    loop {
        let next = 2 * nodes;
        let (k1, k2) = overlap_matrices(h, n, next);
        let change = (&k1 - &j1).amax().max((&k2 - &j2).amax()) * n as f64;
        j1 = k1;
        j2 = k2;
        if change < SEGMENT_TOLERANCE {
            break;
        }
        if next >= MAX_NODES {
            return Err(Error::Quadrature {
                estimate: change,
                tolerance: SEGMENT_TOLERANCE,
                nodes: next,
            });
        }
        nodes = next;
    }
    let alpha = DMatrix::from_fn(n, n, |i, j| {
        let (m, k) = ((i + 1) as f64, (j + 1) as f64);
        Complex64::new((k * j1[(i, j)] + m * j2[(i, j)]) / (m * k).sqrt(), 0.0)
    });
    let beta = DMatrix::from_fn(n, n, |i, j| {
        let (m, k) = ((i + 1) as f64, (j + 1) as f64);
        Complex64::new((k * j1[(i, j)] - m * j2[(i, j)]) / (m * k).sqrt(), 0.0)
    });
    BogoliubovTransform::new(alpha, beta)
}

/// Full round-trip transform in the inertial basis of the starting cavity.
///
/// Consecutive segments of equal orientation share a wedge, so the trip is
/// three Rindler evolutions — `η_a`, `2η_a`, `η_a` — each conjugated by the
/// basis change of its wedge.
pub fn trip_transform(plan: &TrajectoryPlan, n_modes: usize) -> Result<BogoliubovTransform> {
    let rb = RindlerBasis::for_plan(plan, n_modes)?;
    let omega = rb.frequencies();
    let segments = plan.segments();
    let mut t = BogoliubovTransform::identity(n_modes);
    let mut i = 0;
    while i < segments.len() {
        let orientation = segments[i].orientation;
        let mut eta = 0.0;
        while i < segments.len() && segments[i].orientation == orientation {
            eta += segments[i].rindler_duration;
            i += 1;
        }
        let s = oriented_segment(rb.h, n_modes, orientation)?;
        t = t
            .compose_unchecked(&s)?
            .compose_unchecked(&BogoliubovTransform::free_evolution(&omega, eta))?
            .compose_unchecked(&s.inverse_unchecked())?;
    }
    Ok(t)
}

/// Clock phase of the round trip relative to a static cavity of the same
/// proper length.
pub fn trip_phase(plan: &TrajectoryPlan, n_modes: usize) -> Result<PhaseRecord> {
    trip_transform(plan, n_modes)?.relative_phase(plan.omega_dirichlet(), plan.total_time())
}

/// Relative phase of the clock mode with mode mixing and particle creation
/// switched off: it simply runs at `Ω_1` for the Rindler time `4η_a`.
///
/// `4ω t_a (1 − (L/L')·asinh(x)/x)`, `x = a t_a/c`, written without cancellation.
pub fn single_mode_phase(plan: &TrajectoryPlan) -> Result<f64> {
    let z = plan.h() / 2.0;
    if z >= 1.0 {
        return Err(Error::InvalidRigidity { h: plan.h() });
    }
    let a = atanhc_minus_one(z);
    let b = one_minus_asinhc(plan.a() * plan.t_a() / plan.c());
    Ok(plan.omega_dirichlet() * plan.total_time() * (a + b) / (1.0 + a))
}

/// Point-like clock: `ω_ref (4t_a − τ)`.
pub fn ideal_clock_phase(plan: &TrajectoryPlan, omega_ref: f64) -> f64 {
    omega_ref * plan.time_dilation_deficit()
}

/// `atanh(z)/z − 1`.
fn atanhc_minus_one(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        let z2 = z * z;
        z2 * (1.0 / 3.0 + z2 * (1.0 / 5.0 + z2 * (1.0 / 7.0 + z2 * (1.0 / 9.0 + z2 / 11.0))))
    } else {
        atanhc(z) - 1.0
    }
}
