//! Gauss–Legendre quadrature with node doubling, and the Klein–Gordon inner
//! product of mode functions sampled on a constant-time slice.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_NODES: usize = 8192;

/// Nodes and weights of a quadrature rule.
pub type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Nodes and weights of the `n`-point rule mapped to [0, 1].
pub fn unit_rule(n: usize) -> Rule {
    static RULES: OnceLock<RwLock<HashMap<usize, Rule>>> = OnceLock::new();
    let rules = RULES.get_or_init(Default::default);
    if let Some(r) = rules.read().expect("rule cache poisoned").get(&n) {
        return r.clone();
    }
    let gl = gauss_quad::GaussLegendre::new(n.max(2).try_into().expect("n >= 2"));
    let (mut x, mut w): (Vec<f64>, Vec<f64>) = gl.iter().map(|(x, w)| ((x + 1.0) / 2.0, w / 2.0)).unzip();
    // keep node order deterministic and ascending
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    x = idx.iter().map(|&i| x[i]).collect();
    w = idx.iter().map(|&i| w[i]).collect();
    let r = Arc::new((x, w));
    rules.write().expect("rule cache poisoned").insert(n, r.clone());
    r
}

/// Integrates `f` over `[a, b]`, doubling the node count from `start` until
/// two successive estimates differ by less than `tol` (absolute).
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, start: usize, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut n = start.max(4);
    let rule_sum = |n: usize| {
        let r = unit_rule(n);
        let span = b - a;
        r.0.iter()
            .zip(r.1.iter())
            .map(|(&x, &w)| f(a + span * x) * (w * span))
            .sum::<Complex64>()
    };
    let mut prev = rule_sum(n);
    loop {
        let next_n = 2 * n;
        let cur = rule_sum(next_n);
        let change = (cur - prev).norm();
        if change < tol {
            return Ok(cur);
        }
        if next_n >= MAX_NODES {
            return Err(Error::Quadrature {
                estimate: change,
                tolerance: tol,
                nodes: next_n,
            });
        }
        prev = cur;
        n = next_n;
    }
}

/// A real-valued mode shape on the `t = 0` slice, written in lab
/// coordinates: value `f(x)` and the time derivative `∂_t f(x)` of the
/// complex mode `f(x) e^{−iΩ τ(x, t)}`.
pub trait SliceMode {
    /// Spatial support `[x_min, x_max]` in lab coordinates.
    fn support(&self) -> (f64, f64);
    /// `(value, time derivative)` at lab position `x`.
    fn eval(&self, x: f64) -> (Complex64, Complex64);
    /// Rough number of half-wavelengths over the support, used to seed the
    /// quadrature.
    fn oscillations(&self) -> usize {
        1
    }
}

/// Klein–Gordon inner product `(a, b) = (−i/c) ∫ (a ∂_t b* − b* ∂_t a) dx`
/// over the common support.
pub fn kg_inner_product<A, B>(a: &A, b: &B, c: f64, tol: f64) -> Result<Complex64>
where
    A: SliceMode + ?Sized,
    B: SliceMode + ?Sized,
{
    let (a0, a1) = a.support();
    let (b0, b1) = b.support();
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    if !(hi > lo) {
        return Err(Error::DisjointSupport { a0, a1, b0, b1 });
    }
    let i = Complex64::new(0.0, 1.0);
    let start = 8 * (a.oscillations() + b.oscillations() + 2);
    let v = integrate_adaptive(
        |x| {
            let (fa, dfa) = a.eval(x);
            let (fb, dfb) = b.eval(x);
            fa * dfb.conj() - fb.conj() * dfa
        },
        lo,
        hi,
        start,
        tol * c,
    )?;
    Ok(-i * v / c)
}

/// Complex conjugate of another mode, `f*`.
pub struct Conjugate<'a, M: SliceMode + ?Sized>(pub &'a M);

impl<M: SliceMode + ?Sized> SliceMode for Conjugate<'_, M> {
    fn support(&self) -> (f64, f64) {
        self.0.support()
    }
    fn eval(&self, x: f64) -> (Complex64, Complex64) {
        let (f, df) = self.0.eval(x);
        (f.conj(), df.conj())
    }
    fn oscillations(&self) -> usize {
        self.0.oscillations()
    }
}

/// Dirichlet mode `sin(nπ(x − x_l)/L)/√(πn) e^{−iω_n t}` of an inertial cavity.
#[derive(Debug, Clone, Copy)]
pub struct MinkowskiMode {
    pub n: usize,
    pub x_left: f64,
    pub length: f64,
    pub c: f64,
}

impl SliceMode for MinkowskiMode {
    fn support(&self) -> (f64, f64) {
        (self.x_left, self.x_left + self.length)
    }
    fn eval(&self, x: f64) -> (Complex64, Complex64) {
        let n = self.n as f64;
        let pi = std::f64::consts::PI;
        let w = pi * n * self.c / self.length;
        let f = (pi * n * (x - self.x_left) / self.length).sin() / (pi * n).sqrt();
        (Complex64::new(f, 0.0), Complex64::new(0.0, -w * f))
    }
    fn oscillations(&self) -> usize {
        self.n
    }
}

/// Dirichlet mode of a uniformly accelerated cavity, `sin(mπ(ξ − ξ_l)/L')/√(πm)
/// e^{−iΩ_m η}`, evaluated on the `η = 0` slice through lab coordinates.
///
/// The chart is `x = (c²/a) e^{aξ/c²}`, `t = 0`, with the centre at `ξ = 0`,
/// so `∂_t = e^{−aξ/c²} ∂_η = (c²/(a x)) ∂_η` there.
#[derive(Debug, Clone, Copy)]
pub struct RindlerMode {
    pub m: usize,
    pub a: f64,
    pub length: f64,
    pub c: f64,
}

impl RindlerMode {
    fn h(&self) -> f64 {
        self.a * self.length / (self.c * self.c)
    }
    fn radius(&self) -> f64 {
        self.c * self.c / self.a
    }
    fn rindler_length(&self) -> f64 {
        crate::trajectory::rindler_length(self.length, self.h()).expect("rigid cavity")
    }
}

impl SliceMode for RindlerMode {
    fn support(&self) -> (f64, f64) {
        let r = self.radius();
        let h = self.h();
        (r * (1.0 - h / 2.0), r * (1.0 + h / 2.0))
    }
    fn eval(&self, x: f64) -> (Complex64, Complex64) {
        let pi = std::f64::consts::PI;
        let m = self.m as f64;
        let r = self.radius();
        let x_l = self.support().0;
        let lp = self.rindler_length();
        let xi_rel = r * ((x - x_l) / x_l).ln_1p();
        let f = (pi * m * xi_rel / lp).sin() / (pi * m).sqrt();
        let omega = pi * m * self.c / lp;
        let redshift = r / x;
        (Complex64::new(f, 0.0), Complex64::new(0.0, -omega * redshift * f))
    }
    fn oscillations(&self) -> usize {
        self.m
    }
}

/// Static Robin mode `N sin(kx + δ) e^{−ikct}` on `[0, L_cav]`.
#[derive(Debug, Clone, Copy)]
pub struct RobinMode {
    pub k: f64,
    pub delta: f64,
    pub norm: f64,
    pub l_cav: f64,
    pub c: f64,
}

impl SliceMode for RobinMode {
    fn support(&self) -> (f64, f64) {
        (0.0, self.l_cav)
    }
    fn eval(&self, x: f64) -> (Complex64, Complex64) {
        let f = self.norm * (self.k * x + self.delta).sin();
        (Complex64::new(f, 0.0), Complex64::new(0.0, -self.k * self.c * f))
    }
    fn oscillations(&self) -> usize {
        (self.k * self.l_cav / std::f64::consts::PI).ceil() as usize
    }
}
