//! Time-stepped evolution of a Robin cavity with moving effective lengths.
//!
//! Each step of length `dt` is a sudden change to the static basis at the
//! step midpoint followed by free evolution in that basis; a final sudden
//! change lands in the basis of the end time. The scheme is second order in
//! `dt`.
//!
//! Truncating the basis to N modes leaves an error in the clock phase that
//! decays like `1/N` (every sudden step leaks a little amplitude into modes
//! that are not kept). Phase estimates are therefore extrapolated in N from
//! the ladder `N, 2N, 4N` assuming `f(N) = f∞ + a/N + b/N²`.

use num_complex::Complex64;
use serde::Serialize;

use super::{sudden_coefficients, ModeBasis};
use crate::bogoliubov::{clock_phase_of, unwrap_near, BogoliubovTransform, PhaseRecord};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::trajectory::TrajectoryPlan;

/// Time-dependent effective lengths `(d_l(t), d_r(t))` over `[0, duration]`.
pub trait BoundaryDrive: Sync {
    fn l_cav(&self) -> f64;
    fn duration(&self) -> f64;
    fn lengths(&self, t: f64) -> Result<(f64, f64)>;
    /// Fastest time scale in the drive, used to pick a default step.
    fn time_scale(&self) -> f64 {
        self.duration()
    }
}

/// Constant boundaries.
#[derive(Debug, Clone, Copy)]
pub struct StaticDrive {
    pub l_cav: f64,
    pub d_l: f64,
    pub d_r: f64,
    pub duration: f64,
}

impl BoundaryDrive for StaticDrive {
    fn l_cav(&self) -> f64 {
        self.l_cav
    }
    fn duration(&self) -> f64 {
        self.duration
    }
    fn lengths(&self, _t: f64) -> Result<(f64, f64)> {
        Ok((self.d_l, self.d_r))
    }
}

/// Boundaries given by a closure.
pub struct FnDrive<F> {
    pub l_cav: f64,
    pub duration: f64,
    pub time_scale: f64,
    pub f: F,
}

impl<F> BoundaryDrive for FnDrive<F>
where
    F: Fn(f64) -> (f64, f64) + Sync,
{
    fn l_cav(&self) -> f64 {
        self.l_cav
    }
    fn duration(&self) -> f64 {
        self.duration
    }
    fn lengths(&self, t: f64) -> Result<(f64, f64)> {
        Ok((self.f)(t))
    }
    fn time_scale(&self) -> f64 {
        self.time_scale
    }
}

/// SQUID lengths that reproduce the mirror worldlines of a rigid round trip:
/// `d_l = δL_max − (x_l(t) − x_l(0))`, `d_r = δL_min + (x_r(t) − x_r(0))`,
/// with `δL_max = δL_min + d_cav` and `L_cav = L − δL_min − δL_max`.
#[derive(Debug, Clone, Copy)]
pub struct TripDrive {
    pub plan: TrajectoryPlan,
    pub dl_min: f64,
    pub dl_max: f64,
    pub l_cav: f64,
}

impl TripDrive {
    pub fn new(plan: TrajectoryPlan, constants: &PhysicalConstants) -> Result<Self> {
        let dl_min = constants.min_effective_length();
        let dl_max = dl_min + plan.d_cav();
        let l_cav = plan.length() - dl_min - dl_max;
        if !(l_cav > 0.0) {
            return Err(Error::param(
                "L",
                format!(
                    "proper length {} m leaves no room for SQUID lengths {dl_min:e} + {dl_max:e} m",
                    plan.length()
                ),
            ));
        }
        Ok(Self {
            plan,
            dl_min,
            dl_max,
            l_cav,
        })
    }

    /// `δL_max/L_cav`; the effective-length picture needs this small.
    pub fn excursion_ratio(&self) -> f64 {
        self.dl_max / self.l_cav
    }

    /// SQUID fluxes realising the drive at time `t`.
    pub fn fluxes(&self, t: f64, constants: &PhysicalConstants) -> Result<(f64, f64)> {
        let (dl, dr) = self.lengths(t)?;
        Ok((
            super::flux_for_length(dl, constants)?,
            super::flux_for_length(dr, constants)?,
        ))
    }
}

impl BoundaryDrive for TripDrive {
    fn l_cav(&self) -> f64 {
        self.l_cav
    }
    fn duration(&self) -> f64 {
        self.plan.total_time()
    }
    fn lengths(&self, t: f64) -> Result<(f64, f64)> {
        let (xl, xr) = self.plan.mirror_displacements(t)?;
        Ok(((self.dl_max - xl).max(self.dl_min), self.dl_min + xr))
    }
    fn time_scale(&self) -> f64 {
        self.plan.t_a()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolveOptions {
    pub n_modes: usize,
    /// Fixed step (s); `None` picks one from the basis and the drive.
    pub dt: Option<f64>,
    /// Convergence target for the clock phase under step halving: the
    /// refinement stops once `|Δθ| ≤ abs_tol + rel_tol·|θ|`.
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Largest identity defect accepted for a full transform; the automatic
    /// step count is raised until it is met. The sudden-jump product loses
    /// unitarity linearly in the step and only weakly with the truncation.
    pub defect_tol: f64,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            n_modes: 20,
            dt: None,
            abs_tol: 1e-6,
            rel_tol: 1e-3,
            defect_tol: 1e-6,
            max_steps: 1 << 20,
        }
    }
}

impl EvolveOptions {
    pub fn with_modes(n_modes: usize) -> Self {
        Self {
            n_modes,
            ..Self::default()
        }
    }

    /// Number of steps for the given drive: fine enough to resolve the
    /// highest kept mode (`ω_N dt ≤ 1/2`) and the drive itself.
    pub fn steps_for(&self, drive: &dyn BoundaryDrive, c: f64) -> Result<usize> {
        let t = drive.duration();
        let steps = match self.dt {
            Some(dt) => {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(Error::param("dt", format!("must be > 0, got {dt}")));
                }
                (t / dt).ceil()
            }
            None => {
                // Robin wavenumbers never exceed the bare-cavity ones.
                let w_max = std::f64::consts::PI * self.n_modes as f64 * c / drive.l_cav();
                let by_modes = (2.0 * w_max * t).ceil();
                let by_drive = (200.0 * t / drive.time_scale()).ceil();
                by_modes.max(by_drive).max(16.0)
            }
        };
        Ok((steps as usize).clamp(1, self.max_steps))
    }
}

fn check_time(drive: &dyn BoundaryDrive) -> Result<()> {
    let t = drive.duration();
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::param("duration", format!("must be >= 0, got {t}")));
    }
    Ok(())
}

/// Full Bogoliubov transform from the basis at `t = 0` to the basis at the
/// end of the drive, with `steps` uniform steps.
pub fn evolve_robin(drive: &dyn BoundaryDrive, c: f64, n_modes: usize, steps: usize) -> Result<BogoliubovTransform> {
    check_time(drive)?;
    let steps = steps.max(1);
    let t_end = drive.duration();
    let dt = t_end / steps as f64;
    let l = drive.l_cav();
    let (dl, dr) = drive.lengths(0.0)?;
    let mut basis = ModeBasis::solve(l, dl, dr, n_modes)?;
    let mut total = BogoliubovTransform::identity(n_modes);
    let to_complex = |(a, b): (nalgebra::DMatrix<f64>, nalgebra::DMatrix<f64>)| {
        BogoliubovTransform::new(a.map(|x| Complex64::new(x, 0.0)), b.map(|x| Complex64::new(x, 0.0)))
    };
    for i in 0..steps {
        let (dl, dr) = drive.lengths((i as f64 + 0.5) * dt)?;
        let next = ModeBasis::solve(l, dl, dr, n_modes)?;
        let jump = to_complex(sudden_coefficients(&basis, &next)?)?;
        let free = BogoliubovTransform::free_evolution(&next.frequencies(c), dt);
        total = total.compose_unchecked(&jump)?.compose_unchecked(&free)?;
        basis = next;
    }
    let (dl, dr) = drive.lengths(t_end)?;
    let last = ModeBasis::solve(l, dl, dr, n_modes)?;
    total.compose_unchecked(&to_complex(sudden_coefficients(&basis, &last)?)?)
}

/// First columns `(α_{·1}, β_{·1})` of the evolution: all the clock phase
/// needs, in `O(N²)` per step instead of `O(N³)`.
pub fn evolve_clock_column(
    drive: &dyn BoundaryDrive,
    c: f64,
    n_modes: usize,
    steps: usize,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_time(drive)?;
    let steps = steps.max(1);
    let n = n_modes;
    let t_end = drive.duration();
    let dt = t_end / steps as f64;
    let l = drive.l_cav();
    let (dl, dr) = drive.lengths(0.0)?;
    let mut basis = ModeBasis::solve(l, dl, dr, n)?;
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let mut y = x.clone();
    x[0] = Complex64::new(1.0, 0.0);
    let mut xn = x.clone();
    let mut yn = y.clone();
    let mut apply =
        |a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>, x: &mut Vec<Complex64>, y: &mut Vec<Complex64>| {
            for m in 0..n {
                let mut sx = Complex64::new(0.0, 0.0);
                let mut sy = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    let (amj, bmj) = (a[(m, j)], b[(m, j)]);
                    sx += amj * x[j] + bmj * y[j].conj();
                    sy += amj * y[j] + bmj * x[j].conj();
                }
                xn[m] = sx;
                yn[m] = sy;
            }
            x.copy_from_slice(&xn);
            y.copy_from_slice(&yn);
        };
    for i in 0..steps {
        let (dl, dr) = drive.lengths((i as f64 + 0.5) * dt)?;
        let next = ModeBasis::solve(l, dl, dr, n)?;
        let (a, b) = sudden_coefficients(&basis, &next)?;
        apply(&a, &b, &mut x, &mut y);
        for m in 0..n {
            let ph = Complex64::from_polar(1.0, next.k[m] * c * dt);
            x[m] *= ph;
            y[m] *= ph;
        }
        basis = next;
    }
    let (dl, dr) = drive.lengths(t_end)?;
    let last = ModeBasis::solve(l, dl, dr, n)?;
    let (a, b) = sudden_coefficients(&basis, &last)?;
    apply(&a, &b, &mut x, &mut y);
    Ok((x, y))
}

/// Relative clock phase after a column evolution.
pub fn column_phase(
    drive: &dyn BoundaryDrive,
    c: f64,
    n_modes: usize,
    steps: usize,
    omega_ref: f64,
) -> Result<PhaseRecord> {
    let (x, y) = evolve_clock_column(drive, c, n_modes, steps)?;
    PhaseRecord::from_amplitude(x[0] - y[0], omega_ref, drive.duration())
}

/// Step-refined relative phase at fixed truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepConverged {
    /// Second-order Richardson combination of the last two step counts (rad).
    pub theta_rel: f64,
    /// Change between the last two step counts (rad).
    pub step_change: f64,
    pub steps: usize,
    pub dt: f64,
}

/// Halves the step until the clock phase is stable to the requested
/// tolerance, then applies Richardson extrapolation in `dt`.
pub fn converge_steps(
    drive: &dyn BoundaryDrive,
    c: f64,
    opts: &EvolveOptions,
    omega_ref: f64,
) -> Result<StepConverged> {
    let mut steps = opts.steps_for(drive, c)?;
    let mut prev = column_phase(drive, c, opts.n_modes, steps, omega_ref)?.theta_rel();
    loop {
        let fine_steps = 2 * steps;
        let fine = unwrap_near(
            column_phase(drive, c, opts.n_modes, fine_steps, omega_ref)?.theta_rel(),
            prev,
        );
        let change = fine - prev;
        let tol = opts.abs_tol + opts.rel_tol * fine.abs();
        if change.abs() <= tol || opts.dt.is_some() {
            return Ok(StepConverged {
                theta_rel: fine + change / 3.0,
                step_change: change.abs(),
                steps: fine_steps,
                dt: drive.duration() / fine_steps as f64,
            });
        }
        if 2 * fine_steps > opts.max_steps {
            return Err(Error::StepConvergence {
                estimate: change.abs(),
                tolerance: tol,
                dt: drive.duration() / fine_steps as f64,
            });
        }
        steps = fine_steps;
        prev = fine;
    }
}

/// Clock phase extrapolated to infinite truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtrapolatedPhase {
    /// Extrapolated relative phase (rad).
    pub theta_rel: f64,
    /// Step-converged phases at each truncation of the ladder.
    pub ladder: Vec<(usize, f64)>,
    /// Difference between the extrapolation and the best single truncation;
    /// a conservative estimate of the remaining truncation error (rad).
    pub truncation_estimate: f64,
    pub step_change: f64,
}

/// `(f(N) − 6 f(2N) + 8 f(4N))/3`.
pub fn richardson_in_modes(f: [f64; 3]) -> f64 {
    (f[0] - 6.0 * f[1] + 8.0 * f[2]) / 3.0
}

pub fn extrapolated_phase(
    drive: &dyn BoundaryDrive,
    c: f64,
    opts: &EvolveOptions,
    omega_ref: f64,
) -> Result<ExtrapolatedPhase> {
    let base = opts.n_modes.max(2);
    let ns = [base, 2 * base, 4 * base];
    let results: Vec<Result<StepConverged>> = {
        use rayon::prelude::*;
        ns.par_iter()
            .map(|&n| {
                let o = EvolveOptions { n_modes: n, ..*opts };
                converge_steps(drive, c, &o, omega_ref)
            })
            .collect()
    };
    let mut f = [0.0; 3];
    let mut step_change = 0.0_f64;
    for (i, r) in results.into_iter().enumerate() {
        let r = r?;
        f[i] = if i == 0 {
            r.theta_rel
        } else {
            unwrap_near(r.theta_rel, f[i - 1])
        };
        step_change = step_change.max(r.step_change);
    }
    let theta = richardson_in_modes(f);
    Ok(ExtrapolatedPhase {
        theta_rel: theta,
        ladder: ns.iter().copied().zip(f).collect(),
        truncation_estimate: (theta - f[2]).abs(),
        step_change,
    })
}

/// A Robin simulation of a rigid round trip.
#[derive(Debug, Clone)]
pub struct RobinTrip {
    pub drive: TripDrive,
    /// Full transform at the requested truncation and step.
    pub transform: BogoliubovTransform,
    /// Phase of `transform` relative to the static Dirichlet cavity of
    /// proper length `L`.
    pub phase: PhaseRecord,
    pub steps: usize,
    /// Clock-phase change when the step is halved (rad).
    pub step_change: f64,
    pub warnings: Vec<String>,
}

pub fn trip_warnings(drive: &TripDrive) -> Vec<String> {
    let ratio = drive.excursion_ratio();
    if ratio > 0.1 {
        vec![format!(
            "dL_max/L_cav = {ratio:.3} exceeds 0.1; the effective-length picture is poorly justified"
        )]
    } else {
        Vec::new()
    }
}

/// Drives the SQUIDs to mimic the mirrors of `plan` and evolves the full
/// transform, checking the step against a half-step rerun. With an automatic
/// step the count is also raised until the transform meets `defect_tol`.
pub fn simulate_trip_robin(
    plan: &TrajectoryPlan,
    constants: &PhysicalConstants,
    opts: &EvolveOptions,
) -> Result<RobinTrip> {
    let drive = TripDrive::new(*plan, constants)?;
    let c = plan.c();
    let mut steps = opts.steps_for(&drive, c)?;
    let omega = plan.omega_dirichlet();
    let mut transform = evolve_robin(&drive, c, opts.n_modes, steps)?;
    let mut warnings = trip_warnings(&drive);
    if opts.dt.is_none() {
        while transform.defects().max() > opts.defect_tol {
            // Defects scale as 1/steps: jump straight to the predicted count.
            let factor = (transform.defects().max() / opts.defect_tol * 1.25).ceil().max(2.0);
            let next = ((steps as f64 * factor) as usize).min(opts.max_steps);
            if next <= steps {
                warnings.push(format!(
                    "identity defect {:.1e} above {:.1e} at the step limit ({steps} steps)",
                    transform.defects().max(),
                    opts.defect_tol
                ));
                break;
            }
            steps = next;
            transform = evolve_robin(&drive, c, opts.n_modes, steps)?;
        }
    }
    let phase = transform.relative_phase(omega, plan.total_time())?;
    let half = column_phase(&drive, c, opts.n_modes, 2 * steps, omega)?;
    let step_change = (unwrap_near(half.theta_rel(), phase.theta_rel()) - phase.theta_rel()).abs();
    let tol = opts.abs_tol + opts.rel_tol * phase.theta_rel().abs();
    if opts.dt.is_none() && step_change > tol {
        return Err(Error::StepConvergence {
            estimate: step_change,
            tolerance: tol,
            dt: plan.total_time() / steps as f64,
        });
    }
    Ok(RobinTrip {
        warnings,
        drive,
        transform,
        phase,
        steps,
        step_change,
    })
}

/// Relative clock phase of the Robin trip, converged in the step and
/// extrapolated in the truncation.
pub fn robin_trip_phase(
    plan: &TrajectoryPlan,
    constants: &PhysicalConstants,
    opts: &EvolveOptions,
) -> Result<ExtrapolatedPhase> {
    let drive = TripDrive::new(*plan, constants)?;
    extrapolated_phase(&drive, plan.c(), opts, plan.omega_dirichlet())
}

/// Phase of the clock mode of a static Robin cavity relative to the static
/// Dirichlet reference of length `l_ref`, over `duration`.
pub fn static_offset_phase(l_cav: f64, d_l: f64, d_r: f64, c: f64, l_ref: f64, duration: f64) -> Result<f64> {
    let b = ModeBasis::solve(l_cav, d_l, d_r, 1)?;
    let w_ref = std::f64::consts::PI * c / l_ref;
    clock_phase_of(Complex64::from_polar(1.0, (b.k[0] * c - w_ref) * duration))
}
