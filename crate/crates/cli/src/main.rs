use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cavity_sim::fourier::{fit_trip, harmonic_budget, write_waveform, DEFAULT_SAMPLES};
use cavity_sim::models::{ModelContext, ModelRegistry};
use cavity_sim::robin::{trip_warnings, TripDrive};
use cavity_sim::scenario::{self, ScenarioConfig, ScenarioKind, ScenarioResult};
use cavity_sim::{PhysicalConstants, TrajectoryPlan};
use clap::{Args, Parser, Subcommand};

/// Clock phases of rigidly accelerated cavities and their SQUID analogue.
#[derive(Parser)]
#[command(name = "cavity-sim", version, about)]
struct Cli {
    #[command(flatten)]
    global: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// Mode truncation (Dirichlet transforms and base of the Robin ladder).
    #[arg(long, global = true)]
    n_modes: Option<usize>,
    /// Fixed Robin time step in seconds (default: automatic refinement).
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Wave speed in m/s.
    #[arg(long, global = true)]
    c: Option<f64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(n) = self.n_modes {
            cfg.n_modes = n;
            cfg.robin_modes = n.max(2);
        }
        if let Some(dt) = self.dt {
            cfg.dt = Some(dt);
        }
        if let Some(c) = self.c {
            cfg.c = Some(c);
        }
    }

    fn c(&self) -> f64 {
        self.c.unwrap_or(cavity_sim::constants::DEFAULT_C)
    }
}

#[derive(Args, Clone)]
struct TripArgs {
    /// Proper length of the cavity in m.
    #[arg(long)]
    length: f64,
    /// Duration of each acceleration segment in s.
    #[arg(long)]
    t_a: f64,
    /// Dimensionless acceleration aL/c^2.
    #[arg(long, conflicts_with = "a")]
    h: Option<f64>,
    /// Proper acceleration of the centre in m/s^2.
    #[arg(long)]
    a: Option<f64>,
}

impl TripArgs {
    fn plan(&self, c: f64) -> Result<TrajectoryPlan> {
        Ok(match (self.h, self.a) {
            (Some(h), None) => TrajectoryPlan::from_h(h, self.t_a, self.length, c)?,
            (None, Some(a)) => TrajectoryPlan::new(a, self.t_a, self.length, c)?,
            _ => bail!("give one of --h or --a"),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Rerun a built-in figure scenario (or `all`).
    Reproduce {
        /// fig1, fig4, fig4-repeat, fig5, fig6, fig7, fig8 or all
        fig: String,
    },
    /// Run a scenario described by a TOML file.
    Run {
        /// Scenario file (unknown keys are rejected).
        config: PathBuf,
    },
    /// Length scan across the parametric resonance L = 2 c t_a.
    ScanResonance {
        #[arg(long, default_value_t = 1e-10)]
        t_a: f64,
        #[arg(long, default_value_t = 0.0085)]
        h: f64,
        #[arg(long, default_value_t = 200)]
        trips: u64,
        /// Half-width of the scan around L_res, in m.
        #[arg(long, default_value_t = 1e-3)]
        half_width: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// Minimum SQUID length for the Robin check at resonance, in m.
        #[arg(long, default_value_t = 7.5e-6)]
        dl_min: f64,
        /// Skip the Robin simulation at resonance.
        #[arg(long)]
        no_robin: bool,
    },
    /// Fit band-limited SQUID fluxes to a rigid trip and write waveform tables.
    FitFlux {
        #[command(flatten)]
        trip: TripArgs,
        /// Number of harmonics.
        #[arg(long, default_value_t = 10)]
        harmonics: usize,
        #[arg(long, default_value_t = 7.5e-6)]
        dl_min: f64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Rows in each waveform table.
        #[arg(long, default_value_t = 400)]
        rows: usize,
    },
    /// Clock phase of one rigid Dirichlet trip (plus ideal and single-mode).
    SimulateDirichlet {
        #[command(flatten)]
        trip: TripArgs,
        #[arg(long, default_value_t = 1)]
        trips: u64,
    },
    /// Clock phase of the SQUID cavity driven along a rigid trip.
    SimulateRobin {
        #[command(flatten)]
        trip: TripArgs,
        #[arg(long, default_value_t = 7.5e-6)]
        dl_min: f64,
    },
}

fn emit(result: &ScenarioResult, out: &Path) -> Result<()> {
    println!("== {} ({})", result.name, result.kind.as_str());
    for line in &result.summary {
        println!("  {line}");
    }
    for w in &result.metadata.warnings {
        eprintln!("warning: {}: {w}", result.name);
    }
    let files =
        scenario::write_outputs(result, out).with_context(|| format!("writing outputs to {}", out.display()))?;
    for f in files {
        println!("  wrote {}", f.display());
    }
    Ok(())
}

fn run_config(mut cfg: ScenarioConfig, ov: &Overrides) -> Result<()> {
    ov.apply(&mut cfg);
    let result = scenario::run_scenario(&cfg)?;
    emit(&result, &ov.out)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let ov = &cli.global;
    match &cli.command {
        Command::Reproduce { fig } => {
            let ids: Vec<&str> = if fig == "all" {
                scenario::preset_names().to_vec()
            } else {
                vec![fig.as_str()]
            };
            for id in ids {
                for cfg in scenario::preset(id)? {
                    run_config(cfg, ov)?;
                }
            }
        }
        Command::Run { config } => {
            let cfg = ScenarioConfig::from_path(config).with_context(|| format!("loading {}", config.display()))?;
            run_config(cfg, ov)?;
        }
        Command::ScanResonance {
            t_a,
            h,
            trips,
            half_width,
            points,
            dl_min,
            no_robin,
        } => {
            let l_res = scenario::resonance_length(ov.c(), *t_a);
            let mut cfg = ScenarioConfig::new("resonance-scan", ScenarioKind::ResonanceScan, *t_a);
            cfg.length_min = Some(l_res - half_width);
            cfg.length_max = Some(l_res + half_width);
            cfg.points = *points;
            cfg.h = Some(*h);
            cfg.trips = *trips;
            cfg.n_modes = 40;
            cfg.dl_min = Some(*dl_min);
            cfg.robin_at_resonance = !no_robin;
            run_config(cfg, ov)?;
        }
        Command::FitFlux {
            trip,
            harmonics,
            dl_min,
            samples,
            rows,
        } => {
            let k = PhysicalConstants::default().with_c(ov.c())?.with_min_length(*dl_min)?;
            let plan = trip.plan(k.c)?;
            let drive = TripDrive::new(plan, &k)?;
            for w in trip_warnings(&drive) {
                eprintln!("warning: {w}");
            }
            let (l, r) = fit_trip(&drive, &k, *harmonics, *samples)?;
            println!(
                "period {:.6e} s, N = {harmonics}, highest harmonic {:.6e} Hz",
                plan.total_time(),
                harmonic_budget(plan.t_a(), *harmonics)
            );
            std::fs::create_dir_all(&ov.out)?;
            for (side, fit) in [("left", &l), ("right", &r)] {
                let path = ov.out.join(format!("waveform_{side}_n{harmonics}.csv"));
                let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
                write_waveform(&mut f, fit, *rows, side)?;
                println!(
                    "{side}: residual {:.3e} m (relative {:.3e}) after {} Gauss-Newton steps; wrote {}",
                    fit.residual,
                    fit.relative_residual,
                    fit.iterations,
                    path.display()
                );
            }
        }
        Command::SimulateDirichlet { trip, trips } => {
            let plan = trip.plan(ov.c())?;
            let ctx = ModelContext {
                n_modes: ov.n_modes.unwrap_or(20),
                ..ModelContext::default()
            };
            let models = ModelRegistry::default();
            let single = models
                .get("dirichlet")?
                .trip_transform(&plan, &ctx)?
                .expect("dirichlet has a transform");
            let defects = single.defects();
            let w = plan.omega_dirichlet();
            let one = single.relative_phase(w, plan.total_time())?.theta_rel();
            let many = scenario::repeat_trips(&single, *trips, false)?
                .relative_phase(w, plan.total_time() * *trips as f64)?
                .unwrapped_near(one * *trips as f64)
                .theta_rel();
            println!("h = {:.6e}, a = {:.6e} m/s^2, N = {}", plan.h(), plan.a(), ctx.n_modes);
            println!("dirichlet ({trips} trips): {:.9e} deg", many.to_degrees());
            for name in ["single-mode", "ideal"] {
                let p = models.get(name)?.trip_phase(&plan, &ctx)?.theta_rel * *trips as f64;
                println!("{name} ({trips} trips): {:.9e} deg", p.to_degrees());
            }
            println!(
                "single-trip defects: unitarity {:.2e}, symplectic {:.2e}",
                defects.unitarity, defects.symplectic
            );
        }
        Command::SimulateRobin { trip, dl_min } => {
            let k = PhysicalConstants::default().with_c(ov.c())?.with_min_length(*dl_min)?;
            let plan = trip.plan(k.c)?;
            let n = ov.n_modes.unwrap_or(20);
            let ctx = ModelContext {
                n_modes: n,
                robin_modes: n.max(2),
                dt: ov.dt,
                constants: k,
                ..ModelContext::default()
            };
            let models = ModelRegistry::default();
            let robin = models.get("robin")?.trip_phase(&plan, &ctx)?;
            let dir = models.get("dirichlet")?.trip_phase(&plan, &ctx)?;
            for w in &robin.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "h = {:.6e}, a = {:.6e} m/s^2, Robin ladder from N = {}",
                plan.h(),
                plan.a(),
                ctx.robin_modes
            );
            println!("robin:     {:.9e} rad (+/- {:.1e})", robin.theta_rel, robin.uncertainty);
            println!("dirichlet: {:.9e} rad", dir.theta_rel);
            match scenario::relative_error_percent(dir.theta_rel, robin.theta_rel, robin.uncertainty) {
                Some(eps) => println!("epsilon:   {eps:.4}%"),
                None => println!("epsilon:   not resolved (dirichlet phase below 10x the robin uncertainty)"),
            }
        }
    }
    Ok(())
}
