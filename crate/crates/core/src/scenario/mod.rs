//! Scenario configuration, runners and figure presets.
//!
//! A scenario is a flat TOML table. `kind` picks the runner; the remaining
//! keys describe the trajectory family and the numerics:
//!
//! ```toml
//! name = "fig5"
//! kind = "robin-trip"
//! t_a = 1e-10
//! length = 0.095
//! h_min = 1e-3
//! h_max = 2e-2
//! points = 8
//! dl_min = 7.5e-6
//! ```
//!
//! Unknown keys are rejected so that typos do not silently fall back to
//! defaults.

mod output;
mod presets;
mod runners;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::{PhysicalConstants, DEFAULT_C};
use crate::error::{Error, Result};
use crate::models::{ModelContext, ModelRegistry};
use crate::trajectory::TrajectoryPlan;

pub use output::{write_csv, write_outputs, write_svg, Column};
pub use presets::{preset, preset_names};
pub use runners::{repeat_trips, resonance_length, RunnerRegistry, ScenarioRunner};

/// Relative errors are only formed where the reference phase exceeds this
/// many times the uncertainty of the phase compared against it.
pub const EPSILON_RESOLUTION: f64 = 10.0;

/// `100 (reference − value)/reference`, or `None` when the reference is not
/// resolved against `uncertainty`.
pub fn relative_error_percent(reference: f64, value: f64, uncertainty: f64) -> Option<f64> {
    (reference != 0.0 && reference.abs() > EPSILON_RESOLUTION * uncertainty)
        .then(|| 100.0 * (reference - value) / reference)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    DirichletSweep,
    RobinTrip,
    FourierCompare,
    ResonanceScan,
    RepeatTrips,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::DirichletSweep => "dirichlet-sweep",
            ScenarioKind::RobinTrip => "robin-trip",
            ScenarioKind::FourierCompare => "fourier-compare",
            ScenarioKind::ResonanceScan => "resonance-scan",
            ScenarioKind::RepeatTrips => "repeat-trips",
        }
    }
}

fn default_points() -> usize {
    8
}
fn default_modes() -> usize {
    20
}
fn default_trips() -> u64 {
    1
}
fn default_harmonics() -> Vec<usize> {
    vec![2, 4, 6, 10]
}
fn default_samples() -> usize {
    crate::fourier::DEFAULT_SAMPLES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: ScenarioKind,
    /// Duration of each of the four acceleration segments (s).
    pub t_a: f64,
    /// Fixed proper length (m); required unless the length is scanned.
    pub length: Option<f64>,
    pub length_min: Option<f64>,
    pub length_max: Option<f64>,
    /// Fixed `h = aL/c²`.
    pub h: Option<f64>,
    pub h_min: Option<f64>,
    pub h_max: Option<f64>,
    /// Fixed proper acceleration of the centre (m/s²), alternative to `h`.
    pub a: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub log_spacing: bool,
    /// Minimum SQUID effective length (m); sets the critical current.
    pub dl_min: Option<f64>,
    /// Wave speed in the waveguide (m/s).
    pub c: Option<f64>,
    /// Truncation of the Dirichlet transforms.
    #[serde(default = "default_modes")]
    pub n_modes: usize,
    /// Smallest truncation of the Robin extrapolation ladder.
    #[serde(default = "default_modes")]
    pub robin_modes: usize,
    /// Fixed Robin time step (s); automatic refinement when absent.
    pub dt: Option<f64>,
    #[serde(default = "default_trips")]
    pub trips: u64,
    /// Drop particle creation from the single-trip transform before
    /// repeating it.
    #[serde(default)]
    pub strip_beta: bool,
    #[serde(default = "default_harmonics")]
    pub harmonics: Vec<usize>,
    /// Clock models to evaluate; empty selects the runner's default set.
    #[serde(default)]
    pub models: Vec<String>,
    #[serde(default = "default_samples")]
    pub flux_samples: usize,
    /// For resonance scans: also run the Robin cavity at the grid point
    /// closest to `L = 2 c t_a`.
    #[serde(default)]
    pub robin_at_resonance: bool,
    /// Free-form assumptions copied into the metadata.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl ScenarioConfig {
    /// Minimal configuration; everything else takes its default.
    pub fn new(name: &str, kind: ScenarioKind, t_a: f64) -> Self {
        Self {
            name: name.to_string(),
            kind,
            t_a,
            length: None,
            length_min: None,
            length_max: None,
            h: None,
            h_min: None,
            h_max: None,
            a: None,
            points: default_points(),
            log_spacing: false,
            dl_min: None,
            c: None,
            n_modes: default_modes(),
            robin_modes: default_modes(),
            dt: None,
            trips: default_trips(),
            strip_beta: false,
            harmonics: default_harmonics(),
            models: Vec::new(),
            flux_samples: default_samples(),
            robin_at_resonance: false,
            notes: Vec::new(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn constants(&self) -> Result<PhysicalConstants> {
        let mut k = PhysicalConstants::default().with_c(self.c.unwrap_or(DEFAULT_C))?;
        if let Some(dl) = self.dl_min {
            k = k.with_min_length(dl)?;
        }
        Ok(k)
    }

    pub fn model_context(&self) -> Result<ModelContext> {
        Ok(ModelContext {
            n_modes: self.n_modes,
            robin_modes: self.robin_modes,
            dt: self.dt,
            constants: self.constants()?,
            harmonics: self.harmonics.iter().copied().max().unwrap_or(10),
            flux_samples: self.flux_samples,
        })
    }

    /// The swept axis and its grid.
    pub fn axis(&self) -> Result<Axis> {
        let grid = |lo: f64, hi: f64| -> Result<Vec<f64>> {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Config(format!(
                    "sweep bounds must satisfy min <= max, got {lo} and {hi}"
                )));
            }
            if self.points == 0 {
                return Err(Error::Config("points must be at least 1".into()));
            }
            if self.points == 1 || lo == hi {
                return Ok(vec![lo]);
            }
            if self.log_spacing && lo <= 0.0 {
                return Err(Error::Config("log_spacing needs a positive lower bound".into()));
            }
            let n = self.points - 1;
            Ok((0..=n)
                .map(|i| {
                    let s = i as f64 / n as f64;
                    if self.log_spacing {
                        lo * (hi / lo).powf(s)
                    } else {
                        lo + (hi - lo) * s
                    }
                })
                .collect())
        };
        match (self.length_min, self.length_max) {
            (Some(lo), Some(hi)) => {
                if self.length.is_some() {
                    return Err(Error::Config("give either length or length_min/length_max".into()));
                }
                if self.h.is_none() && self.a.is_none() {
                    return Err(Error::Config("a length scan needs a fixed h or a".into()));
                }
                return Ok(Axis::Length(grid(lo, hi)?));
            }
            (None, None) => {}
            _ => return Err(Error::Config("length_min and length_max must be given together".into())),
        }
        if self.length.is_none() {
            return Err(Error::Config("missing key `length` (or length_min/length_max)".into()));
        }
        match (self.h_min, self.h_max, self.h, self.a) {
            (Some(lo), Some(hi), None, None) => Ok(Axis::H(grid(lo, hi)?)),
            (None, None, Some(h), None) => Ok(Axis::H(vec![h])),
            (None, None, None, Some(a)) => Ok(Axis::Acceleration(vec![a])),
            (None, None, None, None) => Err(Error::Config("missing key: one of h, a or h_min/h_max".into())),
            _ => Err(Error::Config("give exactly one of h, a or h_min/h_max".into())),
        }
    }

    /// Trajectory at sweep coordinate `x` of `axis`.
    pub fn plan_at(&self, axis: &Axis, x: f64) -> Result<TrajectoryPlan> {
        let c = self.c.unwrap_or(DEFAULT_C);
        match axis {
            Axis::H(_) => TrajectoryPlan::from_h(x, self.t_a, self.length.unwrap_or(f64::NAN), c),
            Axis::Acceleration(_) => TrajectoryPlan::new(x, self.t_a, self.length.unwrap_or(f64::NAN), c),
            Axis::Length(_) => match (self.h, self.a) {
                (Some(h), _) => TrajectoryPlan::from_h(h, self.t_a, x, c),
                (None, Some(a)) => TrajectoryPlan::new(a, self.t_a, x, c),
                (None, None) => Err(Error::Config("a length scan needs a fixed h or a".into())),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Config(format!("name `{}` must be a plain file stem", self.name)));
        }
        if !(self.t_a > 0.0) {
            return Err(Error::Config(format!("t_a must be positive, got {}", self.t_a)));
        }
        if self.n_modes == 0 || self.robin_modes < 2 {
            return Err(Error::Config("n_modes must be >= 1 and robin_modes >= 2".into()));
        }
        if self.trips == 0 {
            return Err(Error::Config("trips must be at least 1".into()));
        }
        if self.harmonics.is_empty() || self.harmonics.contains(&0) {
            return Err(Error::Config(
                "harmonics must be a non-empty list of positive counts".into(),
            ));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(Error::Config(format!("dt must be positive, got {dt}")));
            }
        }
        self.constants()?;
        let axis = self.axis()?;
        for &x in axis.values() {
            self.plan_at(&axis, x)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    H(Vec<f64>),
    Acceleration(Vec<f64>),
    Length(Vec<f64>),
}

impl Axis {
    pub fn values(&self) -> &[f64] {
        match self {
            Axis::H(v) | Axis::Acceleration(v) | Axis::Length(v) => v,
        }
    }

    pub fn column(&self) -> Column {
        match self {
            Axis::H(_) => Column::new("h", "1"),
            Axis::Acceleration(_) => Column::new("a", "m/s^2"),
            Axis::Length(_) => Column::new("L", "m"),
        }
    }
}

/// Tabular outcome of a scenario plus everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub name: String,
    pub kind: ScenarioKind,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Option<f64>>>,
    /// Columns drawn in the plot (indices into `columns`; the first column
    /// is always the abscissa).
    pub plot_columns: Vec<usize>,
    pub metadata: Metadata,
    /// Human-readable diagnostics, one line each.
    pub summary: Vec<String>,
    /// Additional tables (file name, contents), e.g. flux waveforms.
    #[serde(skip)]
    pub extra_files: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub config: ScenarioConfig,
    pub constants: PhysicalConstants,
    pub assumptions: Vec<String>,
    pub diagnostics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl ScenarioResult {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Values of the named column.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn diagnostic(&self, key: &str) -> Option<f64> {
        self.metadata.diagnostics.get(key).copied()
    }
}

/// Validates and runs a scenario with the default model and runner sets.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    run_with(cfg, &ModelRegistry::default(), &RunnerRegistry::default())
}

pub fn run_with(cfg: &ScenarioConfig, models: &ModelRegistry, runners: &RunnerRegistry) -> Result<ScenarioResult> {
    let go = || {
        cfg.validate()?;
        runners.get(cfg.kind.as_str())?.run(cfg, models)
    };
    go().map_err(|e| e.in_scenario(&cfg.name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_needs_a_resolved_reference() {
        let e = relative_error_percent(2e-7, 1.9e-7, 1e-9).unwrap();
        assert!((e - 5.0).abs() < 1e-9, "{e}");
        assert_eq!(relative_error_percent(2e-7, 1.9e-7, 1e-7), None);
        assert_eq!(relative_error_percent(0.0, 1.0, 0.0), None);
    }

    const FIG5: &str = r#"
name = "fig5"
kind = "robin-trip"
t_a = 1e-10
length = 0.095
h_min = 1e-3
h_max = 2e-2
points = 4
dl_min = 7.5e-6
"#;

    #[test]
    fn parses_a_flat_table() {
        let cfg = ScenarioConfig::from_toml_str(FIG5).unwrap();
        assert_eq!(cfg.kind, ScenarioKind::RobinTrip);
        assert_eq!(cfg.n_modes, 20);
        assert_eq!(cfg.harmonics, vec![2, 4, 6, 10]);
        let axis = cfg.axis().unwrap();
        assert_eq!(axis.values().len(), 4);
        assert!((axis.values()[3] - 2e-2).abs() < 1e-18);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_keys_with_context() {
        let err = ScenarioConfig::from_toml_str(&format!("{FIG5}\nn_mode = 4\n")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("n_mode"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn rejects_bad_kinds_and_values() {
        assert!(ScenarioConfig::from_toml_str(&FIG5.replace("robin-trip", "robin")).is_err());
        let cfg = ScenarioConfig::from_toml_str(&FIG5.replace("t_a = 1e-10", "t_a = -1.0")).unwrap();
        assert!(cfg.validate().is_err());
        let cfg = ScenarioConfig::from_toml_str(&FIG5.replace("h_max = 2e-2", "h_max = 2.5")).unwrap();
        assert!(matches!(cfg.validate(), Err(Error::InvalidRigidity { .. })));
        let cfg = ScenarioConfig::from_toml_str(&format!("{FIG5}h = 0.1\n")).unwrap();
        assert!(cfg.axis().is_err());
    }

    #[test]
    fn length_scans_keep_h_fixed() {
        let mut cfg = ScenarioConfig::new("scan", ScenarioKind::ResonanceScan, 1e-10);
        cfg.length_min = Some(0.02);
        cfg.length_max = Some(0.03);
        cfg.points = 3;
        cfg.h = Some(0.0085);
        let axis = cfg.axis().unwrap();
        for &l in axis.values() {
            let p = cfg.plan_at(&axis, l).unwrap();
            assert!((p.h() - 0.0085).abs() < 1e-15);
            assert_eq!(p.length(), l);
        }
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ScenarioConfig::from_toml_str(FIG5).unwrap();
        let again = ScenarioConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn errors_carry_the_scenario_name() {
        let mut cfg = ScenarioConfig::from_toml_str(FIG5).unwrap();
        cfg.points = 0;
        let msg = run_scenario(&cfg).unwrap_err().to_string();
        assert!(msg.starts_with("scenario `fig5`"), "{msg}");
    }
}
