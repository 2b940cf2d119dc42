//! SQUID-terminated waveguide cavity: effective lengths, static Robin modes,
//! sudden basis changes and their time-stepped composition.

mod evolve;
pub mod fdtd;
mod modes;
mod squid;
mod sudden;

pub use evolve::*;
pub use modes::ModeBasis;
pub use squid::{delta_l_eff, flux_for_length};
pub use sudden::{instantaneous_bogoliubov, sinc, sudden_coefficients};

use serde::Serialize;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Physical cavity between two SQUIDs with instantaneous effective lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobinCavityConfig {
    pub l_cav: f64,
    pub d_l: f64,
    pub d_r: f64,
    pub constants: PhysicalConstants,
}

impl RobinCavityConfig {
    pub fn new(l_cav: f64, d_l: f64, d_r: f64, constants: PhysicalConstants) -> Result<Self> {
        constants.validate()?;
        if !(l_cav.is_finite() && l_cav > 0.0) {
            return Err(Error::param("L_cav", format!("must be > 0, got {l_cav}")));
        }
        let m = constants.min_effective_length();
        for d in [d_l, d_r] {
            if !(d >= m * (1.0 - 1e-12)) {
                return Err(Error::UnreachableLength { target: d, minimum: m });
            }
        }
        Ok(Self {
            l_cav,
            d_l,
            d_r,
            constants,
        })
    }

    pub fn solve_wavenumbers(&self, n_modes: usize) -> Result<ModeBasis> {
        ModeBasis::solve(self.l_cav, self.d_l, self.d_r, n_modes)
    }

    /// SQUID fluxes producing `(d_l, d_r)`.
    pub fn fluxes(&self) -> Result<(f64, f64)> {
        Ok((
            flux_for_length(self.d_l, &self.constants)?,
            flux_for_length(self.d_r, &self.constants)?,
        ))
    }
}

/// Ratio of the fundamental Robin frequency of the cavity set up for a trip
/// at its starting configuration (`d_l = δL_max`, `d_r = δL_min`) to the
/// Dirichlet frequency `πc/L`.
pub fn frequency_ratio(l: f64, d_cav: f64, dl_min: f64) -> Result<f64> {
    let dl_max = dl_min + d_cav;
    let l_cav = l - dl_min - dl_max;
    if !(l_cav > 0.0) {
        return Err(Error::param("L", format!("{l} m is shorter than the SQUID lengths")));
    }
    let b = ModeBasis::solve(l_cav, dl_max, dl_min, 1)?;
    Ok(b.k[0] * l / std::f64::consts::PI)
}
