//! Bogoliubov-transformation simulator for rigidly accelerated cavities and
//! for their analogue: a waveguide cavity closed by two flux-tunable SQUIDs.
//!
//! The crate works entirely in mode space. A [`BogoliubovTransform`] holds the
//! `(α, β)` pair of a truncated basis change; trips are built by composing
//! basis changes and free evolutions, and the observable is the phase of the
//! fundamental ("clock") mode relative to a static cavity.

// `!(x > y)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bogoliubov;
pub mod constants;
pub mod error;
pub mod fourier;
pub mod models;
pub mod quadrature;
pub mod rindler;
pub mod robin;
pub mod scenario;
pub mod trajectory;

pub use bogoliubov::{BogoliubovTransform, Defects, PhaseRecord};
pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use trajectory::TrajectoryPlan;
