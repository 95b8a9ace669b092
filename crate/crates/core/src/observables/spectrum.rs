use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atomic::Spin;
use crate::transit::{expected_counts, DiscQuadrature, Simulation};

use super::stats::skewness;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub excitation_detuning_mhz: f64,
    /// Mean detected photons per atom, both polarizations.
    pub mean_counts: f64,
}

/// Cavity-enhanced fluorescence against drive detuning from the bare line.
/// Atoms arrive with either spin at equal probability; light shifts follow
/// the model's profile when `light_shift_on`.
pub fn fluorescence_spectrum(
    detuning_grid_mhz: &[f64],
    sim: &Simulation,
    light_shift_on: bool,
    quadrature: &DiscQuadrature,
) -> Result<Vec<SpectrumPoint>, crate::ConfigError> {
    let base = if light_shift_on == sim.model.light_shift_enabled() {
        sim.clone()
    } else {
        return Err(crate::ConfigError::Invalid(format!(
            "simulation built with light shift {}, spectrum requested with it {}",
            on_off(sim.model.light_shift_enabled()),
            on_off(light_shift_on)
        )));
    };
    Ok(detuning_grid_mhz
        .par_iter()
        .map(|&d| {
            let s = base.with_model(base.model.with_excitation_detuning_mhz(d));
            let up = expected_counts(&s, Spin::Up, quadrature).total_detected();
            let down = expected_counts(&s, Spin::Down, quadrature).total_detected();
            SpectrumPoint {
                excitation_detuning_mhz: d,
                mean_counts: 0.5 * (up + down),
            }
        })
        .collect())
}

fn on_off(b: bool) -> &'static str {
    if b {
        "on"
    } else {
        "off"
    }
}

/// Grid point with the largest signal.
pub fn peak_detuning(spectrum: &[SpectrumPoint]) -> Option<f64> {
    spectrum
        .iter()
        .max_by(|a, b| a.mean_counts.total_cmp(&b.mean_counts))
        .map(|p| p.excitation_detuning_mhz)
}

/// Skewness of the count-weighted detuning distribution.
pub fn spectrum_skewness(spectrum: &[SpectrumPoint]) -> Option<f64> {
    let x: Vec<f64> = spectrum.iter().map(|p| p.excitation_detuning_mhz).collect();
    let w: Vec<f64> = spectrum.iter().map(|p| p.mean_counts).collect();
    skewness(&x, &w)
}
