//! Band-limited flux drives: a truncated Fourier series fitted so that the
//! SQUID effective length follows the ideal trajectory as closely as
//! possible in the L2 sense.
//!
//! The fit starts from the linear least-squares projection of the flux
//! itself and is then refined by damped Gauss–Newton on the effective-length
//! residual, with the mean effective length held fixed. `δL_eff` is even in the flux, so any series with
//! `|Φ̃| < Φ0/2` is admissible; letting the series change sign is what allows
//! it to follow the `|t|`-like kink the ideal flux has whenever a SQUID sits
//! at its minimum length.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::robin::{delta_l_eff, BoundaryDrive, TripDrive};

pub const DEFAULT_SAMPLES: usize = 2048;
/// Largest admissible |Φ̃|/Φ0 during the fit.
const FLUX_CEILING: f64 = 0.499;
/// Weight of the mean-length row in the refinement. The clock phase is set
/// mostly by the time-averaged cavity length, so the fit keeps the mean of
/// `δL_eff` while minimising the pointwise misfit.
const MEAN_WEIGHT: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierFlux {
    /// Constant term Φ̃0 (Wb).
    pub offset: f64,
    /// Amplitudes a_n (Wb).
    pub amplitudes: Vec<f64>,
    /// Phases δ_n (rad) in `a_n cos(2πnt/T + δ_n)`.
    pub phases: Vec<f64>,
    /// Period T (s).
    pub period: f64,
}

impl FourierFlux {
    pub fn harmonics(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let w = 2.0 * std::f64::consts::PI / self.period;
        self.offset
            + self
                .amplitudes
                .iter()
                .zip(&self.phases)
                .enumerate()
                .map(|(i, (a, d))| a * ((i + 1) as f64 * w * t + d).cos())
                .sum::<f64>()
    }

    fn from_coefficients(p: &DVector<f64>, period: f64) -> Self {
        let n = (p.len() - 1) / 2;
        let mut amplitudes = Vec::with_capacity(n);
        let mut phases = Vec::with_capacity(n);
        for k in 0..n {
            let (a, b) = (p[1 + 2 * k], p[2 + 2 * k]);
            amplitudes.push(a.hypot(b));
            phases.push((-b).atan2(a));
        }
        Self {
            offset: p[0],
            amplitudes,
            phases,
            period,
        }
    }
}

/// Maximum waveform frequency `N/(4 t_a)` (Hz) needed for `N` harmonics of a
/// round trip with acceleration time `t_a`.
pub fn harmonic_budget(t_a: f64, n: usize) -> f64 {
    n as f64 / (4.0 * t_a)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluxFit {
    pub flux: FourierFlux,
    /// RMS effective-length mismatch over the sample grid (m).
    pub residual: f64,
    /// `residual` divided by the RMS target length.
    pub relative_residual: f64,
    pub iterations: usize,
}

fn design_matrix(times: &[f64], n: usize, period: f64) -> DMatrix<f64> {
    let w = 2.0 * std::f64::consts::PI / period;
    DMatrix::from_fn(times.len(), 2 * n + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            let k = j.div_ceil(2) as f64;
            if j % 2 == 1 {
                (k * w * times[i]).cos()
            } else {
                (k * w * times[i]).sin()
            }
        }
    })
}

fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    a.clone()
        .svd(true, true)
        .solve(b, 1e-13)
        .map_err(|e| Error::param("fit", format!("least-squares solve failed: {e}")))
}

/// Fits `N` harmonics to a flux sampled uniformly over one period
/// (`target.len()` samples at `t_i = i T / len`).
pub fn fit_flux(target: &[f64], period: f64, n: usize, constants: &PhysicalConstants) -> Result<FluxFit> {
    fit_flux_with(target, period, n, constants, 100)
}

fn fit_flux_with(
    target: &[f64],
    period: f64,
    n: usize,
    constants: &PhysicalConstants,
    max_iterations: usize,
) -> Result<FluxFit> {
    if n == 0 {
        return Err(Error::param("N", "need at least one harmonic"));
    }
    if target.len() < 64 * n {
        return Err(Error::param(
            "samples",
            format!(
                "{} samples are too few for {n} harmonics (need {})",
                target.len(),
                64 * n
            ),
        ));
    }
    let half = 0.5 * constants.phi0;
    if let Some(bad) = target.iter().find(|f| !(f.abs() < half)) {
        return Err(Error::param(
            "target flux",
            format!("{bad:e} Wb is outside |Phi| < Phi0/2"),
        ));
    }
    let m = target.len();
    let times: Vec<f64> = (0..m).map(|i| period * i as f64 / m as f64).collect();
    let basis = design_matrix(&times, n, period);
    let goal: DVector<f64> = target
        .iter()
        .map(|&f| delta_l_eff(f, constants))
        .collect::<Result<Vec<_>>>()?
        .into();
    let scale = (goal.norm_squared() / m as f64).sqrt();

    let mut p = lstsq(&basis, &DVector::from_column_slice(target))?;
    // The linear fit can overshoot towards the divergence at Φ0/2; pull the
    // oscillating part back until the series is admissible.
    let ceiling = FLUX_CEILING * constants.phi0;
    for _ in 0..60 {
        let peak = (&basis * &p).amax();
        if peak < ceiling {
            break;
        }
        for j in 1..p.len() {
            p[j] *= 0.9;
        }
    }

    let residual_of = |p: &DVector<f64>| -> Option<(DVector<f64>, DVector<f64>)> {
        let phi = &basis * p;
        if phi.amax() >= ceiling {
            return None;
        }
        let r = DVector::from_iterator(
            m,
            phi.iter()
                .zip(goal.iter())
                .map(|(&f, &g)| delta_l_eff(f, constants).unwrap_or(f64::INFINITY) - g),
        );
        Some((phi, r))
    };
    let Some((mut phi, mut r)) = residual_of(&p) else {
        return Err(Error::ConstrainedFit {
            max_flux: (&basis * &p).amax(),
        });
    };
    let w = MEAN_WEIGHT / (m as f64).sqrt();
    let cost_of = |r: &DVector<f64>| r.norm_squared() + (w * r.sum()).powi(2);
    let mut cost = cost_of(&r);
    let mut iterations = 0;
    let pi = std::f64::consts::PI;
    let dl_min = constants.min_effective_length();
    for it in 0..max_iterations {
        iterations = it + 1;
        // d δL_eff/dΦ = δL_min (π/Φ0) tan θ /|cos θ|,  θ = πΦ/Φ0
        let slope: Vec<f64> = phi
            .iter()
            .map(|&f| {
                let th = pi * f / constants.phi0;
                dl_min * pi / constants.phi0 * th.tan() / th.cos().abs()
            })
            .collect();
        // Extra row: the mean of the δL_eff residual.
        let jac = DMatrix::from_fn(m + 1, p.len(), |i, j| {
            if i < m {
                slope[i] * basis[(i, j)]
            } else {
                w * (0..m).map(|k| slope[k] * basis[(k, j)]).sum::<f64>()
            }
        });
        let mut rhs = DVector::zeros(m + 1);
        rhs.rows_mut(0, m).copy_from(&(-&r));
        rhs[m] = -w * r.sum();
        let step = lstsq(&jac, &rhs)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-6 {
            let trial = &p + &step * lambda;
            if let Some((tphi, tr)) = residual_of(&trial) {
                let tcost = cost_of(&tr);
                if tcost < cost {
                    let gain = (cost - tcost) / cost.max(f64::MIN_POSITIVE);
                    p = trial;
                    phi = tphi;
                    r = tr;
                    cost = tcost;
                    accepted = gain > 1e-12;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if !cost.is_finite() {
        return Err(Error::ConstrainedFit { max_flux: phi.amax() });
    }
    let residual = (r.norm_squared() / m as f64).sqrt();
    Ok(FluxFit {
        flux: FourierFlux::from_coefficients(&p, period),
        residual,
        relative_residual: residual / scale,
        iterations,
    })
}

/// Ideal SQUID fluxes of a trip drive sampled over one period.
pub fn trip_flux_samples(
    drive: &TripDrive,
    constants: &PhysicalConstants,
    samples: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let t = drive.duration();
    let mut left = Vec::with_capacity(samples);
    let mut right = Vec::with_capacity(samples);
    for i in 0..samples {
        let (fl, fr) = drive.fluxes(t * i as f64 / samples as f64, constants)?;
        left.push(fl);
        right.push(fr);
    }
    Ok((left, right))
}

/// Fits both SQUIDs of a trip drive independently.
pub fn fit_trip(
    drive: &TripDrive,
    constants: &PhysicalConstants,
    n: usize,
    samples: usize,
) -> Result<(FluxFit, FluxFit)> {
    let (left, right) = trip_flux_samples(drive, constants, samples)?;
    let period = drive.duration();
    let (l, r) = rayon::join(
        || fit_flux(&left, period, n, constants),
        || fit_flux(&right, period, n, constants),
    );
    Ok((l?, r?))
}

/// SQUID lengths produced by two band-limited flux waveforms.
#[derive(Debug, Clone)]
pub struct FourierDrive {
    pub left: FourierFlux,
    pub right: FourierFlux,
    pub l_cav: f64,
    pub constants: PhysicalConstants,
}

impl FourierDrive {
    pub fn for_trip(drive: &TripDrive, constants: &PhysicalConstants, n: usize, samples: usize) -> Result<Self> {
        let (l, r) = fit_trip(drive, constants, n, samples)?;
        Ok(Self {
            left: l.flux,
            right: r.flux,
            l_cav: drive.l_cav,
            constants: *constants,
        })
    }
}

impl BoundaryDrive for FourierDrive {
    fn l_cav(&self) -> f64 {
        self.l_cav
    }
    fn duration(&self) -> f64 {
        self.left.period
    }
    fn lengths(&self, t: f64) -> Result<(f64, f64)> {
        Ok((
            delta_l_eff(self.left.eval(t), &self.constants)?,
            delta_l_eff(self.right.eval(t), &self.constants)?,
        ))
    }
    fn time_scale(&self) -> f64 {
        self.left.period / (4.0 * self.left.harmonics().max(1) as f64)
    }
}

/// Writes a two-column `time (s), flux (Wb)` table with a commented header.
pub fn write_waveform<W: Write>(out: &mut W, fit: &FluxFit, samples: usize, label: &str) -> Result<()> {
    let f = &fit.flux;
    writeln!(out, "# squid = {label}")?;
    writeln!(out, "# T = {:e} s", f.period)?;
    writeln!(out, "# N = {}", f.harmonics())?;
    writeln!(out, "# residual = {:e} m", fit.residual)?;
    writeln!(out, "time_s,flux_Wb")?;
    for i in 0..samples {
        let t = f.period * i as f64 / samples as f64;
        writeln!(out, "{:.9e},{:.9e}", t, f.eval(t))?;
    }
    Ok(())
}
