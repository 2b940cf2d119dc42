use serde::Serialize;

use crate::error::{Error, Result};

/// Static modes `N_n sin(k_n x + δ_n)` of a cavity on `[0, L_cav]` with
/// Robin ends `φ − d_l φ' = 0` at `x = 0` and `φ + d_r φ' = 0` at `x = L_cav`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeBasis {
    pub l_cav: f64,
    pub d_l: f64,
    pub d_r: f64,
    pub k: Vec<f64>,
    pub delta: Vec<f64>,
    pub norm: Vec<f64>,
    /// Largest root residual of the cleared equation
    /// `sin(kL)(1 − d_l d_r k²) + k(d_l + d_r) cos(kL) = 0`, divided by the
    /// amplitude of its two terms.
    pub residual: f64,
}

impl ModeBasis {
    pub fn solve(l_cav: f64, d_l: f64, d_r: f64, n_modes: usize) -> Result<Self> {
        if !(l_cav.is_finite() && l_cav > 0.0) {
            return Err(Error::param("L_cav", format!("must be > 0, got {l_cav}")));
        }
        for (name, d) in [("d_l", d_l), ("d_r", d_r)] {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::param(name, format!("must be >= 0, got {d}")));
            }
        }
        let mut k = Vec::with_capacity(n_modes);
        let mut residual = 0.0_f64;
        for n in 1..=n_modes {
            let kn = wavenumber(n, l_cav, d_l, d_r)?;
            residual = residual.max(cleared_residual(kn, l_cav, d_l, d_r));
            k.push(kn);
        }
        let delta: Vec<f64> = k.iter().map(|&kn| (d_l * kn).atan()).collect();
        let norm = k
            .iter()
            .zip(&delta)
            .map(|(&kn, &dn)| {
                let kl = kn * l_cav;
                // kL + (sin 2δ − sin 2(kL + δ))/2 = kL − cos(kL + 2δ) sin(kL)
                1.0 / (kl - (kl + 2.0 * dn).cos() * kl.sin()).sqrt()
            })
            .collect();
        Ok(Self {
            l_cav,
            d_l,
            d_r,
            k,
            delta,
            norm,
            residual,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.k.len()
    }

    pub fn frequencies(&self, c: f64) -> Vec<f64> {
        self.k.iter().map(|k| k * c).collect()
    }

    /// Mode `n` (0-based) at position `x`.
    pub fn mode(&self, n: usize, x: f64) -> f64 {
        self.norm[n] * (self.k[n] * x + self.delta[n]).sin()
    }
}

/// n-th root of `kL + atan(k d_l) + atan(k d_r) = nπ`, the tan-free form of
/// the Robin eigenvalue condition. The left side increases strictly with `k`
/// and changes sign on `[(n−1)π/L, nπ/L]`.
fn wavenumber(n: usize, l: f64, d_l: f64, d_r: f64) -> Result<f64> {
    let pi = std::f64::consts::PI;
    let target = n as f64 * pi;
    if d_l == 0.0 && d_r == 0.0 {
        return Ok(target / l);
    }
    let g = |k: f64| k * l + (k * d_l).atan() + (k * d_r).atan() - target;
    let dg = |k: f64| l + d_l / (1.0 + (k * d_l).powi(2)) + d_r / (1.0 + (k * d_r).powi(2));
    let (mut lo, mut hi) = ((n - 1) as f64 * pi / l, target / l);
    let (f_lo, f_hi) = (g(lo), g(hi));
    if !(f_lo <= 0.0 && f_hi >= 0.0) {
        return Err(Error::Bracketing {
            mode: n,
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    // A few bisections, then safeguarded Newton.
    for _ in 0..8 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut k = 0.5 * (lo + hi);
    for _ in 0..100 {
        let f = g(k);
        if f == 0.0 {
            return Ok(k);
        }
        if f < 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let mut next = k - f / dg(k);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - k).abs() <= 4.0 * f64::EPSILON * k {
            return Ok(next);
        }
        k = next;
    }
    Ok(k)
}

fn cleared_residual(k: f64, l: f64, d_l: f64, d_r: f64) -> f64 {
    let p = 1.0 - d_l * d_r * k * k;
    let q = k * (d_l + d_r);
    ((k * l).sin() * p + q * (k * l).cos()).abs() / p.hypot(q)
}
