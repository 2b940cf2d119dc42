//! Built-in scenarios for the published figures.
//!
//! Where a figure axis is not stated, the sweep is over `h` at the caption's
//! fixed `L` and `t_a`; ranges are chosen to cover the regime discussed with
//! each figure. All presets can be overridden key by key after loading.

use super::{ScenarioConfig, ScenarioKind};
use crate::constants::DEFAULT_C;
use crate::error::{Error, Result};

const DL_SMALL: f64 = 7.5e-6;

pub fn preset_names() -> &'static [&'static str] {
    &["fig1", "fig4", "fig4-repeat", "fig5", "fig6", "fig7", "fig8"]
}

fn h_sweep(name: &str, kind: ScenarioKind, t_a: f64, length: f64, lo: f64, hi: f64, points: usize) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(name, kind, t_a);
    c.length = Some(length);
    c.h_min = Some(lo);
    c.h_max = Some(hi);
    c.points = points;
    c
}

fn resonance(name: &str, h: f64, trips: u64) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(name, ScenarioKind::ResonanceScan, 1e-10);
    c.length_min = Some(0.0228);
    c.length_max = Some(0.0248);
    c.points = 41;
    c.h = Some(h);
    c.trips = trips;
    c.n_modes = 40;
    c.dl_min = Some(DL_SMALL);
    c.robin_at_resonance = true;
    c.notes
        .push("N = 40: at resonance the many-trip phase is not yet converged at N = 20".into());
    c
}

/// Scenario(s) reproducing figure `id`. `fig8` expands to both readings of
/// its acceleration.
pub fn preset(id: &str) -> Result<Vec<ScenarioConfig>> {
    Ok(match id {
        "fig1" => {
            let mut c = h_sweep("fig1", ScenarioKind::DirichletSweep, 1e-9, 0.011, 1e-4, 1e-3, 10);
            c.notes.push("cavity of L = 1.1 cm and t_a = 1 ns".into());
            vec![c]
        }
        "fig4" => {
            let mut c = h_sweep("fig4", ScenarioKind::RobinTrip, 1e-9, 0.122, 1e-4, 1.5e-3, 8);
            c.dl_min = Some(DL_SMALL);
            vec![c]
        }
        "fig4-repeat" => {
            let mut c = h_sweep("fig4-repeat", ScenarioKind::RepeatTrips, 1e-9, 0.122, 1e-4, 1.5e-3, 8);
            c.dl_min = Some(DL_SMALL);
            c.trips = 5000;
            vec![c]
        }
        "fig5" => {
            let mut c = h_sweep("fig5", ScenarioKind::RobinTrip, 1e-10, 0.095, 1e-3, 2e-2, 8);
            c.dl_min = Some(DL_SMALL);
            c.notes
                .push("h range an order of magnitude above the fig4 sweep (shorter, harder trips)".into());
            vec![c]
        }
        "fig6" => {
            let mut c = h_sweep("fig6", ScenarioKind::FourierCompare, 1e-10, 0.0238, 1e-3, 2e-2, 6);
            c.dl_min = Some(DL_SMALL);
            vec![c]
        }
        "fig7" => vec![resonance("fig7", 0.0085, 200)],
        "fig8" => {
            let primary = resonance("fig8", 0.0034, 500);
            let l_res = 2.0 * DEFAULT_C * 1e-10;
            let mut alt = resonance("fig8-a2e16", 2e16 * l_res / (DEFAULT_C * DEFAULT_C), 500);
            alt.notes
                .push("h taken from a = 2e16 m/s^2 at L_res (the other reading of the fig8 parameters)".into());
            vec![primary, alt]
        }
        other => {
            return Err(Error::Unknown {
                kind: "figure",
                name: other.to_string(),
                available: preset_names().join(", "),
            })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for id in preset_names() {
            for cfg in preset(id).unwrap() {
                cfg.validate().unwrap_or_else(|e| panic!("{id}: {e}"));
            }
        }
        assert!(preset("fig2").is_err());
    }

    #[test]
    fn resonance_grid_contains_l_res() {
        let cfg = &preset("fig7").unwrap()[0];
        let axis = cfg.axis().unwrap();
        assert!(axis.values().iter().any(|&l| (l - 0.0238).abs() < 1e-12));
        let alt = &preset("fig8").unwrap()[1];
        assert!((alt.h.unwrap() - 0.0336).abs() < 1e-3);
    }
}
