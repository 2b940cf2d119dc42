//! Finite-difference cross-check for [`evolve_robin`](super::evolve_robin).
//!
//! Each initial mode is evolved as a complex classical field with a leapfrog
//! scheme; the Robin ends enter through ghost points
//!
//! ```text
//! φ₋₁ = φ₁ − 2Δx φ₀/d_l,     φ_{M+1} = φ_{M−1} − 2Δx φ_M/d_r
//! ```
//!
//! and the final field is projected on the final static basis with the
//! Klein–Gordon product (trapezoid rule on the grid).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{BoundaryDrive, ModeBasis};
use crate::bogoliubov::BogoliubovTransform;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdtdOptions {
    /// Number of grid intervals across `L_cav`.
    pub cells: usize,
    /// `c Δt/Δx`; must stay below 1.
    pub courant: f64,
}

impl Default for FdtdOptions {
    fn default() -> Self {
        Self {
            cells: 800,
            courant: 0.5,
        }
    }
}

type Field = Vec<Complex64>;

struct Grid<'a> {
    drive: &'a dyn BoundaryDrive,
    m: usize,
    dx: f64,
    dt: f64,
    steps: usize,
    r2: f64,
    c: f64,
}

impl Grid<'_> {
    fn time(&self, n: usize) -> f64 {
        (n as f64 * self.dt).min(self.drive.duration())
    }

    /// Second difference with Robin ghost points at time index `n`.
    fn laplacian(&self, phi: &[Complex64], n: usize, out: &mut [Complex64]) -> Result<()> {
        let m = self.m;
        let (dl, dr) = self.drive.lengths(self.time(n))?;
        let ghost_l = if dl > 0.0 {
            phi[1] - phi[0] * (2.0 * self.dx / dl)
        } else {
            -phi[1]
        };
        let ghost_r = if dr > 0.0 {
            phi[m - 1] - phi[m] * (2.0 * self.dx / dr)
        } else {
            -phi[m - 1]
        };
        for j in 0..=m {
            let left = if j == 0 { ghost_l } else { phi[j - 1] };
            let right = if j == m { ghost_r } else { phi[j + 1] };
            out[j] = left - phi[j] * 2.0 + right;
        }
        // Dirichlet ends pin the boundary value.
        if dl == 0.0 {
            out[0] = -phi[0] * 2.0;
        }
        if dr == 0.0 {
            out[m] = -phi[m] * 2.0;
        }
        Ok(())
    }

    /// Evolves `(φ, ∂_t φ)` from `t = 0` to the end; returns the final pair.
    fn evolve(&self, phi0: Field, dphi0: Field) -> Result<(Field, Field)> {
        let m = self.m;
        let mut lap = vec![Complex64::new(0.0, 0.0); m + 1];
        self.laplacian(&phi0, 0, &mut lap)?;
        let mut prev = phi0.clone();
        let mut cur: Field = (0..=m)
            .map(|j| phi0[j] + dphi0[j] * self.dt + lap[j] * (0.5 * self.r2))
            .collect();
        let scale = phi0.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let mut next = vec![Complex64::new(0.0, 0.0); m + 1];
        for n in 1..=self.steps {
            self.laplacian(&cur, n, &mut lap)?;
            for j in 0..=m {
                next[j] = cur[j] * 2.0 - prev[j] + lap[j] * self.r2;
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
            if n % 256 == 0 && cur.iter().any(|z| !(z.norm() < 1e6 * scale)) {
                return Err(Error::Fdtd(format!(
                    "field grew by more than 1e6 after {n} steps; the boundary stencil is unstable \
                     for these lengths (try more cells or a smaller Courant number)"
                )));
            }
        }
        // `prev` is the field at the final time, `cur` one step later and
        // `next` (after the swaps) one step earlier.
        let dphi = (0..=m).map(|j| (cur[j] - next[j]) / (2.0 * self.dt)).collect();
        Ok((prev, dphi))
    }
}

fn trapezoid(f: impl Fn(usize) -> Complex64, m: usize, dx: f64) -> Complex64 {
    let mut s = (f(0) + f(m)) * 0.5;
    for j in 1..m {
        s += f(j);
    }
    s * dx
}

/// Finite-difference estimate of the Bogoliubov transform produced by `drive`.
pub fn fdtd_oracle(
    drive: &dyn BoundaryDrive,
    c: f64,
    n_modes: usize,
    opts: &FdtdOptions,
) -> Result<BogoliubovTransform> {
    if !(opts.courant > 0.0 && opts.courant < 1.0) {
        return Err(Error::Fdtd(format!(
            "Courant number {} violates 0 < c dt/dx < 1",
            opts.courant
        )));
    }
    if opts.cells < 8 * n_modes {
        return Err(Error::Fdtd(format!(
            "{} cells cannot resolve {n_modes} modes (need at least {})",
            opts.cells,
            8 * n_modes
        )));
    }
    let l = drive.l_cav();
    let m = opts.cells;
    let dx = l / m as f64;
    let t_end = drive.duration();
    let steps = ((t_end * c / (opts.courant * dx)).ceil() as usize).max(1);
    let dt = t_end / steps as f64;
    let grid = Grid {
        drive,
        m,
        dx,
        dt,
        steps,
        r2: (c * dt / dx).powi(2),
        c,
    };
    let (dl, dr) = drive.lengths(0.0)?;
    let initial = ModeBasis::solve(l, dl, dr, n_modes)?;
    let (dl, dr) = drive.lengths(t_end)?;
    let fin = ModeBasis::solve(l, dl, dr, n_modes)?;
    let xs: Vec<f64> = (0..=m).map(|j| j as f64 * dx).collect();

    let columns: Vec<Result<(Vec<Complex64>, Vec<Complex64>)>> = (0..n_modes)
        .into_par_iter()
        .map(|n| {
            let w = initial.k[n] * c;
            let phi0: Field = xs.iter().map(|&x| Complex64::new(initial.mode(n, x), 0.0)).collect();
            let dphi0: Field = phi0.iter().map(|z| Complex64::new(0.0, -w) * z).collect();
            let (u, du) = grid.evolve(phi0, dphi0)?;
            let mut a = vec![Complex64::new(0.0, 0.0); n_modes];
            let mut b = vec![Complex64::new(0.0, 0.0); n_modes];
            let i = Complex64::new(0.0, 1.0);
            for mm in 0..n_modes {
                let wm = fin.k[mm] * c;
                let s = |j: usize| fin.mode(mm, xs[j]);
                a[mm] = trapezoid(|j| (u[j].conj() * wm - i * du[j].conj()) * s(j), m, dx) / grid.c;
                b[mm] = i * trapezoid(|j| (du[j] + i * wm * u[j]) * s(j), m, dx) / grid.c;
            }
            Ok((a, b))
        })
        .collect();
    let mut alpha = DMatrix::zeros(n_modes, n_modes);
    let mut beta = DMatrix::zeros(n_modes, n_modes);
    for (n, col) in columns.into_iter().enumerate() {
        let (a, b) = col?;
        for mm in 0..n_modes {
            alpha[(mm, n)] = a[mm];
            beta[(mm, n)] = b[mm];
        }
    }
    BogoliubovTransform::new(alpha, beta)
}
