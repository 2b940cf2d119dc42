use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{relative_error_percent, Axis, Column, Metadata, ScenarioConfig, ScenarioKind, ScenarioResult};
use crate::bogoliubov::BogoliubovTransform;
use crate::error::{Error, Result};
use crate::fourier::{fit_trip, write_waveform};
use crate::models::{ClockModel, ModelContext, ModelRegistry, PhaseEstimate};
use crate::rindler;
use crate::robin::TripDrive;
use crate::trajectory::TrajectoryPlan;

pub trait ScenarioRunner: Send + Sync {
    /// Value of the `kind` key this runner handles.
    fn kind(&self) -> &'static str;
    fn run(&self, cfg: &ScenarioConfig, models: &ModelRegistry) -> Result<ScenarioResult>;
}

/// Name → runner lookup.
pub struct RunnerRegistry {
    runners: BTreeMap<&'static str, Box<dyn ScenarioRunner>>,
}

impl Default for RunnerRegistry {
    fn default() -> Self {
        let mut r = Self {
            runners: BTreeMap::new(),
        };
        r.register(Box::new(ModelSweep {
            kind: ScenarioKind::DirichletSweep,
            defaults: &["dirichlet", "single-mode", "ideal"],
        }));
        r.register(Box::new(ModelSweep {
            kind: ScenarioKind::RobinTrip,
            defaults: &["dirichlet", "robin", "single-mode", "ideal"],
        }));
        r.register(Box::new(FourierCompare));
        r.register(Box::new(ResonanceScan));
        r.register(Box::new(RepeatTrips));
        r
    }
}

impl RunnerRegistry {
    pub fn register(&mut self, runner: Box<dyn ScenarioRunner>) {
        self.runners.insert(runner.kind(), runner);
    }

    pub fn get(&self, kind: &str) -> Result<&dyn ScenarioRunner> {
        self.runners
            .get(kind)
            .map(|r| r.as_ref())
            .ok_or_else(|| Error::Unknown {
                kind: "scenario kind",
                name: kind.to_string(),
                available: self.kinds().join(", "),
            })
    }

    pub fn kinds(&self) -> Vec<&'static str> {
        self.runners.keys().copied().collect()
    }
}

/// `count`-fold composition of a single-trip transform, optionally with
/// particle creation removed first.
pub fn repeat_trips(single: &BogoliubovTransform, count: u64, strip_beta: bool) -> Result<BogoliubovTransform> {
    if count == 0 {
        return Err(Error::param("trips", "need at least one trip"));
    }
    if single.alpha().nrows() != single.alpha().ncols() {
        return Err(Error::DimensionMismatch {
            left: single.alpha().nrows(),
            right: single.alpha().ncols(),
        });
    }
    Ok(if strip_beta {
        single.strip_particle_creation().power(count)
    } else {
        single.power(count)
    })
}

/// `L_res = 2 c t_a`: the trip frequency `π/(2t_a)` equals `2ω₁`.
pub fn resonance_length(c: f64, t_a: f64) -> f64 {
    2.0 * c * t_a
}

fn select_models<'m>(
    cfg: &ScenarioConfig,
    registry: &'m ModelRegistry,
    defaults: &[&str],
) -> Result<Vec<&'m dyn ClockModel>> {
    if cfg.models.is_empty() {
        defaults.iter().map(|n| registry.get(n)).collect()
    } else {
        cfg.models.iter().map(|n| registry.get(n)).collect()
    }
}

fn base_result(cfg: &ScenarioConfig, axis: &Axis, columns: Vec<Column>) -> Result<ScenarioResult> {
    let mut assumptions = Vec::new();
    match axis {
        Axis::H(_) => assumptions.push("abscissa: h = aL/c^2 at fixed L and t_a".to_string()),
        Axis::Acceleration(_) => assumptions.push("abscissa: proper acceleration a at fixed L and t_a".to_string()),
        Axis::Length(_) if cfg.h.is_some() => {
            assumptions.push("abscissa: proper length L with h held fixed (a = h c^2/L per point)".to_string())
        }
        Axis::Length(_) => assumptions.push("abscissa: proper length L with a held fixed".to_string()),
    }
    assumptions
        .push("phases are relative to a static Dirichlet cavity of the same proper length; positive = lags".into());
    assumptions.extend(cfg.notes.iter().cloned());
    Ok(ScenarioResult {
        name: cfg.name.clone(),
        kind: cfg.kind,
        columns,
        rows: Vec::new(),
        plot_columns: Vec::new(),
        metadata: Metadata {
            config: cfg.clone(),
            constants: cfg.constants()?,
            assumptions,
            diagnostics: BTreeMap::new(),
            warnings: Vec::new(),
        },
        summary: Vec::new(),
        extra_files: Vec::new(),
    })
}

fn push_warnings(result: &mut ScenarioResult, warnings: impl IntoIterator<Item = String>) {
    for w in warnings {
        if !result.metadata.warnings.contains(&w) {
            result.metadata.warnings.push(w);
        }
    }
}

fn fmt_x(axis: &Axis, x: f64) -> String {
    let c = axis.column();
    if c.unit == "1" {
        format!("{} = {x:.4e}", c.name)
    } else {
        format!("{} = {x:.4e} {}", c.name, c.unit)
    }
}

/// Index of the largest `|v|` among present values.
fn argmax_abs(values: &[Option<f64>]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v.abs())))
        .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}

/// Evaluates a set of clock models at every sweep point.
struct ModelSweep {
    kind: ScenarioKind,
    defaults: &'static [&'static str],
}

impl ScenarioRunner for ModelSweep {
    fn kind(&self) -> &'static str {
        self.kind.as_str()
    }

    fn run(&self, cfg: &ScenarioConfig, registry: &ModelRegistry) -> Result<ScenarioResult> {
        let axis = cfg.axis()?;
        let ctx = cfg.model_context()?;
        let chosen = select_models(cfg, registry, self.defaults)?;
        let points: Vec<(TrajectoryPlan, Vec<PhaseEstimate>)> = axis
            .values()
            .par_iter()
            .map(|&x| {
                let plan = cfg.plan_at(&axis, x)?;
                let est = chosen
                    .par_iter()
                    .map(|m| m.trip_phase(&plan, &ctx))
                    .collect::<Result<Vec<_>>>()?;
                Ok((plan, est))
            })
            .collect::<Result<Vec<_>>>()?;

        let names: Vec<&str> = chosen.iter().map(|m| m.name()).collect();
        let mut columns = vec![axis.column(), Column::new("a", "m/s^2")];
        let first_theta = columns.len();
        for n in &names {
            columns.push(Column::new(&format!("theta_{n}"), "deg"));
        }
        let with_err: Vec<usize> = (0..names.len())
            .filter(|&j| points.iter().any(|(_, e)| e[j].uncertainty > 0.0))
            .collect();
        for &j in &with_err {
            columns.push(Column::new(&format!("err_{}", names[j]), "deg"));
        }
        let d_idx = names.iter().position(|n| *n == "dirichlet");
        let r_idx = names.iter().position(|n| *n == "robin");
        let both = d_idx.zip(r_idx);
        if both.is_some() {
            columns.push(Column::new("epsilon", "%"));
        }

        let mut result = base_result(cfg, &axis, columns)?;
        result.plot_columns = (first_theta..first_theta + names.len()).collect();
        for ((plan, est), &x) in points.iter().zip(axis.values()) {
            let mut row = vec![Some(x), Some(plan.a())];
            row.extend(est.iter().map(|e| Some(e.theta_rel.to_degrees())));
            row.extend(with_err.iter().map(|&j| Some(est[j].uncertainty.to_degrees())));
            if let Some((d, r)) = both {
                row.push(relative_error_percent(
                    est[d].theta_rel,
                    est[r].theta_rel,
                    est[r].uncertainty,
                ));
            }
            result.rows.push(row);
            push_warnings(&mut result, est.iter().flat_map(|e| e.warnings.iter().cloned()));
        }
        for (j, n) in names.iter().enumerate() {
            let worst = points.iter().map(|(_, e)| e[j].uncertainty).fold(0.0, f64::max);
            if worst > 0.0 {
                result
                    .metadata
                    .diagnostics
                    .insert(format!("max_uncertainty_{n}_rad"), worst);
            }
        }
        if let Some((d, r)) = both {
            let dvals: Vec<Option<f64>> = points.iter().map(|(_, e)| Some(e[d].theta_rel)).collect();
            if let Some(i) = argmax_abs(&dvals) {
                let x = axis.values()[i];
                let (dp, rp) = (points[i].1[d].theta_rel, points[i].1[r].theta_rel);
                result.metadata.diagnostics.insert("peak_abscissa".into(), x);
                result
                    .metadata
                    .diagnostics
                    .insert("peak_theta_dirichlet_rad".into(), dp);
                result.metadata.diagnostics.insert("peak_theta_robin_rad".into(), rp);
                if let Some(eps) = relative_error_percent(dp, rp, points[i].1[r].uncertainty) {
                    result
                        .metadata
                        .diagnostics
                        .insert("epsilon_at_peak_percent".into(), eps);
                    result.summary.push(format!(
                        "sweep peak at {}: dirichlet {:.6e} deg, robin {:.6e} deg, epsilon {eps:.4}%",
                        fmt_x(&axis, x),
                        dp.to_degrees(),
                        rp.to_degrees()
                    ));
                }
            }
        }
        for ((_, est), &x) in points.iter().zip(axis.values()) {
            let parts: Vec<String> = names
                .iter()
                .zip(est)
                .map(|(n, e)| format!("{n} {:.6e} deg", e.theta_rel.to_degrees()))
                .collect();
            result
                .summary
                .push(format!("{}: {}", fmt_x(&axis, x), parts.join(", ")));
        }
        Ok(result)
    }
}

/// Accumulated phase of many identical trips.
struct RepeatTrips;

impl ScenarioRunner for RepeatTrips {
    fn kind(&self) -> &'static str {
        ScenarioKind::RepeatTrips.as_str()
    }

    fn run(&self, cfg: &ScenarioConfig, registry: &ModelRegistry) -> Result<ScenarioResult> {
        let axis = cfg.axis()?;
        let ctx = cfg.model_context()?;
        let chosen = select_models(cfg, registry, &["dirichlet", "single-mode", "ideal"])?;
        let n = cfg.trips;
        // (accumulated, n × single trip, has transform)
        type Point = (TrajectoryPlan, Vec<(f64, f64, bool)>);
        let points: Vec<Point> = axis
            .values()
            .par_iter()
            .map(|&x| {
                let plan = cfg.plan_at(&axis, x)?;
                let w = plan.omega_dirichlet();
                let t = plan.total_time();
                let per_model = chosen
                    .iter()
                    .map(|m| {
                        Ok(match m.trip_transform(&plan, &ctx)? {
                            Some(single) => {
                                let one = single.relative_phase(w, t)?.theta_rel();
                                let linear = one * n as f64;
                                let many = repeat_trips(&single, n, cfg.strip_beta)?
                                    .relative_phase(w, t * n as f64)?
                                    .unwrapped_near(linear)
                                    .theta_rel();
                                (many, linear, true)
                            }
                            None => {
                                let linear = m.trip_phase(&plan, &ctx)?.theta_rel * n as f64;
                                (linear, linear, false)
                            }
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((plan, per_model))
            })
            .collect::<Result<Vec<_>>>()?;

        let names: Vec<&str> = chosen.iter().map(|m| m.name()).collect();
        let composed: Vec<usize> = (0..names.len()).filter(|&j| points.iter().all(|p| p.1[j].2)).collect();
        let mut columns = vec![axis.column(), Column::new("a", "m/s^2"), Column::new("total_time", "s")];
        for n in &names {
            columns.push(Column::new(&format!("theta_{n}"), "deg"));
        }
        for &j in &composed {
            columns.push(Column::new(&format!("linear_{}", names[j]), "deg"));
            columns.push(Column::new(&format!("nonlinearity_{}", names[j]), "%"));
        }
        let mut result = base_result(cfg, &axis, columns)?;
        result.plot_columns = (3..3 + names.len()).collect();
        result.metadata.assumptions.push(format!(
            "{n} identical trips composed by repeated squaring{}",
            if cfg.strip_beta {
                ", particle creation removed from the single trip"
            } else {
                ""
            }
        ));
        for ((plan, per), &x) in points.iter().zip(axis.values()) {
            let mut row = vec![Some(x), Some(plan.a()), Some(plan.total_time() * n as f64)];
            row.extend(per.iter().map(|p| Some(p.0.to_degrees())));
            for &j in &composed {
                let (many, linear, _) = per[j];
                row.push(Some(linear.to_degrees()));
                row.push((linear.abs() > 0.0).then(|| 100.0 * (many - linear) / linear));
            }
            result.rows.push(row);
            let parts: Vec<String> = names
                .iter()
                .zip(per)
                .map(|(name, p)| format!("{name} {:.6} deg", p.0.to_degrees()))
                .collect();
            result.summary.push(format!(
                "{} ({n} trips, {:.6e} s): {}",
                fmt_x(&axis, x),
                plan.total_time() * n as f64,
                parts.join(", ")
            ));
        }
        Ok(result)
    }
}

/// Many-trip phases of the Dirichlet cavity across a length scan: full vs
/// single-mode (non-adiabatic sensitivity) and with vs without particle
/// creation (β sensitivity).
struct ResonanceScan;

impl ScenarioRunner for ResonanceScan {
    fn kind(&self) -> &'static str {
        ScenarioKind::ResonanceScan.as_str()
    }

    fn run(&self, cfg: &ScenarioConfig, registry: &ModelRegistry) -> Result<ScenarioResult> {
        let axis = cfg.axis()?;
        if !matches!(axis, Axis::Length(_)) {
            return Err(Error::Config("resonance-scan needs length_min/length_max".into()));
        }
        let ctx = cfg.model_context()?;
        let dirichlet = registry.get("dirichlet")?;
        let n = cfg.trips;
        let rows: Vec<(TrajectoryPlan, [f64; 4])> = axis
            .values()
            .par_iter()
            .map(|&l| {
                let plan = cfg.plan_at(&axis, l)?;
                let single = dirichlet
                    .trip_transform(&plan, &ctx)?
                    .ok_or_else(|| Error::param("model", "dirichlet model returned no transform"))?;
                let w = plan.omega_dirichlet();
                let t = plan.total_time();
                let one = single.relative_phase(w, t)?.theta_rel();
                let guess = one * n as f64;
                let full = repeat_trips(&single, n, false)?
                    .relative_phase(w, t * n as f64)?
                    .unwrapped_near(guess)
                    .theta_rel();
                let stripped = repeat_trips(&single, n, true)?
                    .relative_phase(w, t * n as f64)?
                    .unwrapped_near(guess)
                    .theta_rel();
                let adiabatic = rindler::single_mode_phase(&plan)? * n as f64;
                Ok((plan, [one, full, adiabatic, stripped]))
            })
            .collect::<Result<Vec<_>>>()?;

        let columns = vec![
            axis.column(),
            Column::new("a", "m/s^2"),
            Column::new("theta_full", "deg"),
            Column::new("theta_single_mode", "deg"),
            Column::new("theta_no_beta", "deg"),
            Column::new("full_minus_single", "deg"),
            Column::new("beta_contribution", "deg"),
        ];
        let mut result = base_result(cfg, &axis, columns)?;
        result.plot_columns = vec![5, 6];
        result.metadata.assumptions.push(format!(
            "{n} trips, dirichlet truncation N = {}; resonance peaks located on the scan grid",
            cfg.n_modes
        ));
        for (plan, [_, full, single, stripped]) in &rows {
            result.rows.push(vec![
                Some(plan.length()),
                Some(plan.a()),
                Some(full.to_degrees()),
                Some(single.to_degrees()),
                Some(stripped.to_degrees()),
                Some((full - single).to_degrees()),
                Some((full - stripped).to_degrees()),
            ]);
        }

        let ls = axis.values();
        let c = cfg.constants()?.c;
        let l_res = resonance_length(c, cfg.t_a);
        let step = if ls.len() > 1 {
            (ls[ls.len() - 1] - ls[0]) / (ls.len() - 1) as f64
        } else {
            0.0
        };
        let diff = result.column("full_minus_single").unwrap_or_default();
        let beta = result.column("beta_contribution").unwrap_or_default();
        let d = &mut result.metadata.diagnostics;
        d.insert("resonance_length_m".into(), l_res);
        d.insert("grid_step_m".into(), step);
        if let Some(i) = argmax_abs(&beta) {
            d.insert("beta_peak_length_m".into(), ls[i]);
            d.insert("beta_peak_deg".into(), beta[i].unwrap_or(f64::NAN));
        }
        // The full-minus-single curve is dispersive across the resonance: its
        // centre is midway between the two extremes.
        let present: Vec<(usize, f64)> = diff.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect();
        if let (Some(&(imax, vmax)), Some(&(imin, vmin))) = (
            present.iter().max_by(|a, b| a.1.total_cmp(&b.1)),
            present.iter().min_by(|a, b| a.1.total_cmp(&b.1)),
        ) {
            d.insert("nonadiabatic_max_length_m".into(), ls[imax]);
            d.insert("nonadiabatic_max_deg".into(), vmax);
            d.insert("nonadiabatic_min_length_m".into(), ls[imin]);
            d.insert("nonadiabatic_min_deg".into(), vmin);
            d.insert("nonadiabatic_centre_length_m".into(), 0.5 * (ls[imax] + ls[imin]));
        }
        let summary = format!(
            "L_res = {l_res:.6e} m (grid step {step:.3e} m); beta contribution peaks at {:.6e} m ({:.6} deg); \
             full - single extremes at {:.6e} m ({:.6} deg) and {:.6e} m ({:.6} deg)",
            result.diagnostic("beta_peak_length_m").unwrap_or(f64::NAN),
            result.diagnostic("beta_peak_deg").unwrap_or(f64::NAN),
            result.diagnostic("nonadiabatic_max_length_m").unwrap_or(f64::NAN),
            result.diagnostic("nonadiabatic_max_deg").unwrap_or(f64::NAN),
            result.diagnostic("nonadiabatic_min_length_m").unwrap_or(f64::NAN),
            result.diagnostic("nonadiabatic_min_deg").unwrap_or(f64::NAN),
        );
        result.summary.push(summary);

        if cfg.robin_at_resonance {
            let i = (0..ls.len())
                .min_by(|&a, &b| (ls[a] - l_res).abs().total_cmp(&(ls[b] - l_res).abs()))
                .ok_or_else(|| Error::Config("empty length scan".into()))?;
            let (plan, [one, ..]) = rows[i];
            let robin = registry.get("robin")?.trip_phase(&plan, &ctx)?;
            push_warnings(&mut result, robin.warnings.iter().cloned());
            let d = &mut result.metadata.diagnostics;
            d.insert("robin_length_m".into(), plan.length());
            d.insert("dirichlet_trip_phase_rad".into(), one);
            d.insert("robin_trip_phase_rad".into(), robin.theta_rel);
            d.insert("robin_uncertainty_rad".into(), robin.uncertainty);
            let eps = relative_error_percent(one, robin.theta_rel, robin.uncertainty);
            if let Some(e) = eps {
                d.insert("epsilon_at_resonance_percent".into(), e);
            }
            result.summary.push(format!(
                "single trip at L = {:.6e} m: dirichlet {one:.6e} rad, robin {:.6e} rad (+/- {:.1e}), epsilon {}",
                plan.length(),
                robin.theta_rel,
                robin.uncertainty,
                eps.map_or("n/a".to_string(), |e| format!("{e:.4}%"))
            ));
        }
        Ok(result)
    }
}

/// Exact-trajectory Robin phase against band-limited flux drives.
struct FourierCompare;

impl ScenarioRunner for FourierCompare {
    fn kind(&self) -> &'static str {
        ScenarioKind::FourierCompare.as_str()
    }

    fn run(&self, cfg: &ScenarioConfig, registry: &ModelRegistry) -> Result<ScenarioResult> {
        let axis = cfg.axis()?;
        let ctx = cfg.model_context()?;
        let robin = registry.get("robin")?;
        let fourier = registry.get("fourier")?;
        let hs = &cfg.harmonics;
        // (plan, exact, per-N (phase, fit residual))
        type Point = (TrajectoryPlan, PhaseEstimate, Vec<(PhaseEstimate, f64)>);
        let points: Vec<Point> = axis
            .values()
            .par_iter()
            .map(|&x| {
                let plan = cfg.plan_at(&axis, x)?;
                let exact = robin.trip_phase(&plan, &ctx)?;
                let drive = TripDrive::new(plan, &ctx.constants)?;
                let approx = hs
                    .par_iter()
                    .map(|&nh| {
                        let c = ModelContext { harmonics: nh, ..ctx };
                        let (l, r) = fit_trip(&drive, &ctx.constants, nh, ctx.flux_samples)?;
                        Ok((fourier.trip_phase(&plan, &c)?, l.residual.max(r.residual)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((plan, exact, approx))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut columns = vec![
            axis.column(),
            Column::new("a", "m/s^2"),
            Column::new("theta_robin", "deg"),
        ];
        for nh in hs {
            columns.push(Column::new(&format!("theta_fourier_n{nh}"), "deg"));
        }
        for nh in hs {
            columns.push(Column::new(&format!("deviation_n{nh}"), "%"));
        }
        for nh in hs {
            columns.push(Column::new(&format!("fit_residual_n{nh}"), "m"));
        }
        let mut result = base_result(cfg, &axis, columns)?;
        result.plot_columns = (2..3 + hs.len()).collect();
        let deviation = |exact: &PhaseEstimate, approx: f64| {
            relative_error_percent(exact.theta_rel, approx, exact.uncertainty).map(|e| -e)
        };
        for ((plan, exact, approx), &x) in points.iter().zip(axis.values()) {
            let mut row = vec![Some(x), Some(plan.a()), Some(exact.theta_rel.to_degrees())];
            row.extend(approx.iter().map(|(p, _)| Some(p.theta_rel.to_degrees())));
            row.extend(approx.iter().map(|(p, _)| deviation(exact, p.theta_rel)));
            row.extend(approx.iter().map(|(_, r)| Some(*r)));
            result.rows.push(row);
            push_warnings(&mut result, exact.warnings.iter().cloned());
        }

        let exact: Vec<Option<f64>> = points.iter().map(|p| Some(p.1.theta_rel)).collect();
        if let Some(i) = argmax_abs(&exact) {
            let (plan, ex, approx) = &points[i];
            let devs: Vec<f64> = approx
                .iter()
                .map(|(p, _)| (p.theta_rel - ex.theta_rel).abs() / ex.theta_rel.abs())
                .collect();
            let d = &mut result.metadata.diagnostics;
            d.insert("peak_abscissa".into(), axis.values()[i]);
            d.insert("peak_theta_robin_rad".into(), ex.theta_rel);
            for (nh, dev) in hs.iter().zip(&devs) {
                d.insert(format!("peak_abs_deviation_n{nh}_percent"), 100.0 * dev);
            }
            let monotone = devs.windows(2).all(|w| w[1] <= w[0]);
            d.insert("monotone_improvement".into(), if monotone { 1.0 } else { 0.0 });
            result.summary.push(format!(
                "sweep peak at {}: robin {:.6e} deg; |deviation| {} ({})",
                fmt_x(&axis, axis.values()[i]),
                ex.theta_rel.to_degrees(),
                hs.iter()
                    .zip(&devs)
                    .map(|(nh, d)| format!("N={nh}: {:.2}%", 100.0 * d))
                    .collect::<Vec<_>>()
                    .join(", "),
                if monotone { "monotone in N" } else { "not monotone in N" }
            ));

            // Waveform tables for the largest harmonic count at the peak.
            let nh = *hs.iter().max().unwrap_or(&10);
            let drive = TripDrive::new(*plan, &ctx.constants)?;
            let (l, r) = fit_trip(&drive, &ctx.constants, nh, ctx.flux_samples)?;
            for (side, fit) in [("left", &l), ("right", &r)] {
                let mut buf = Vec::new();
                write_waveform(&mut buf, fit, 400, side)?;
                let text = String::from_utf8(buf).map_err(|e| Error::Config(e.to_string()))?;
                result
                    .extra_files
                    .push((format!("{}_waveform_{side}_n{nh}.csv", cfg.name), text));
            }
        }
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::run_scenario;

    #[test]
    fn repeat_once_is_identity_operation() {
        let plan = TrajectoryPlan::from_h(0.01, 1e-10, 0.02, 1.19e8).unwrap();
        let t = rindler::trip_transform(&plan, 8).unwrap();
        let once = repeat_trips(&t, 1, false).unwrap();
        assert_eq!(once.alpha(), t.alpha());
        assert_eq!(once.beta(), t.beta());
        assert!(repeat_trips(&t, 0, false).is_err());
        let stripped = repeat_trips(&t, 3, true).unwrap();
        assert!(stripped.beta().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn static_scenario_has_no_dirichlet_phase() {
        let mut cfg = ScenarioConfig::new("static", ScenarioKind::DirichletSweep, 1e-9);
        cfg.length = Some(0.011);
        cfg.a = Some(0.0);
        cfg.models = vec!["dirichlet".into(), "ideal".into()];
        let r = run_scenario(&cfg).unwrap();
        for v in r.column("theta_dirichlet").unwrap() {
            assert!(v.unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn sweep_rows_and_units() {
        let mut cfg = ScenarioConfig::new("fig1-small", ScenarioKind::DirichletSweep, 1e-9);
        cfg.length = Some(0.011);
        cfg.h_min = Some(1e-4);
        cfg.h_max = Some(1e-3);
        cfg.points = 3;
        cfg.n_modes = 8;
        let r = run_scenario(&cfg).unwrap();
        assert_eq!(r.rows.len(), 3);
        let names: Vec<String> = r.columns.iter().map(|c| c.to_string()).collect();
        assert_eq!(names[0], "h [1]");
        assert!(names.contains(&"theta_single-mode [deg]".to_string()));
        // larger h, larger lag
        let th = r.column("theta_dirichlet").unwrap();
        assert!(th[2].unwrap() > th[0].unwrap());
        assert!(r.column("epsilon").is_none());
    }

    #[test]
    fn unknown_model_in_config_is_reported() {
        let mut cfg = ScenarioConfig::new("bad", ScenarioKind::DirichletSweep, 1e-9);
        cfg.length = Some(0.011);
        cfg.h = Some(1e-3);
        cfg.models = vec!["rindler".into()];
        let msg = run_scenario(&cfg).unwrap_err().to_string();
        assert!(msg.contains("unknown clock model `rindler`"), "{msg}");
    }

    #[test]
    fn repeated_trips_are_linear_far_from_resonance() {
        // L far below L_res = 2.38 cm for t_a = 0.1 ns, small h
        let mut cfg = ScenarioConfig::new("rep", ScenarioKind::RepeatTrips, 1e-10);
        cfg.length = Some(0.005);
        cfg.h = Some(1e-3);
        cfg.trips = 50;
        cfg.n_modes = 16;
        cfg.models = vec!["dirichlet".into()];
        let r = run_scenario(&cfg).unwrap();
        let nl = r.column("nonlinearity_dirichlet").unwrap()[0].unwrap();
        assert!(nl.abs() < 1.0, "{nl}%");
        let total = r.column("total_time").unwrap()[0].unwrap();
        assert!((total - 50.0 * 4e-10).abs() < 1e-22);
    }

    #[test]
    fn resonance_scan_reports_peaks() {
        let mut cfg = ScenarioConfig::new("res", ScenarioKind::ResonanceScan, 1e-10);
        cfg.length_min = Some(0.0228);
        cfg.length_max = Some(0.0248);
        cfg.points = 5;
        cfg.h = Some(0.0085);
        cfg.trips = 20;
        cfg.n_modes = 12;
        let r = run_scenario(&cfg).unwrap();
        assert_eq!(r.rows.len(), 5);
        assert!(r.diagnostic("beta_peak_length_m").is_some());
        assert!((r.diagnostic("resonance_length_m").unwrap() - 0.0238).abs() < 1e-15);
    }
}
