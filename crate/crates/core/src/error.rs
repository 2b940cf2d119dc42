use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode-count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error(
        "Bogoliubov identities violated: unitarity defect {unitarity:.3e}, \
         symplectic defect {symplectic:.3e} (tolerance {tolerance:.1e})"
    )]
    IdentityViolation {
        unitarity: f64,
        symplectic: f64,
        tolerance: f64,
    },

    #[error("clock phase undefined: alpha_11 - beta_11 vanishes")]
    UndefinedPhase,

    #[error("time {t:e} s outside the trajectory domain [0, {end:e}] s")]
    OutOfDomain { t: f64, end: f64 },

    #[error("rigidity requires 0 <= h < 2, got h = {h}")]
    InvalidRigidity { h: f64 },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("effective length diverges at flux {flux:e} Wb (|cos(pi Phi/Phi0)| = 0)")]
    FluxDivergence { flux: f64 },

    #[error("length {target:e} m is below the SQUID minimum {minimum:e} m")]
    UnreachableLength { target: f64, minimum: f64 },

    #[error("root bracketing failed for mode {mode} on [{lo:e}, {hi:e}] (f = {f_lo:e}, {f_hi:e})")]
    Bracketing {
        mode: usize,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("mode supports [{a0:e}, {a1:e}] and [{b0:e}, {b1:e}] do not overlap")]
    DisjointSupport { a0: f64, a1: f64, b0: f64, b1: f64 },

    #[error("quadrature did not converge: change {estimate:.3e} > {tolerance:.1e} at {nodes} nodes")]
    Quadrature {
        estimate: f64,
        tolerance: f64,
        nodes: usize,
    },

    #[error(
        "time stepping not converged: clock-phase change {estimate:.3e} rad > {tolerance:.1e} \
         at dt = {dt:e} s; try a smaller dt"
    )]
    StepConvergence { estimate: f64, tolerance: f64, dt: f64 },

    #[error("finite-difference configuration rejected: {0}")]
    Fdtd(String),

    #[error("Fourier fit left the admissible flux range |Phi| < Phi0/2 (max |Phi| = {max_flux:e} Wb)")]
    ConstrainedFit { max_flux: f64 },

    #[error("unknown {kind} `{name}` (available: {available})")]
    Unknown {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn in_scenario(self, scenario: &str) -> Self {
        Error::Scenario {
            scenario: scenario.to_string(),
            source: Box::new(self),
        }
    }
}
