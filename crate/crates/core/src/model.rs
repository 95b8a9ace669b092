//! Position-resolved physics assembled from a [`SimConfig`].

use crate::atomic::{build_level_scheme, LevelScheme, Polarization, Spin};
use crate::config::{ConfigError, ShiftProfile, SimConfig};
use crate::dynamics::{adiabatic_rates, CavityParams, EmissionRates, LocalConditions};
use crate::half::Half;
use crate::lightshift::{beam_intensity, shift_components, BeamParams, ShiftResult};
use crate::units::{mhz_to_angular, saturation_intensity};

/// Light-shift beam with its per-intensity shifts precomputed.
#[derive(Clone, Debug, PartialEq)]
struct ShiftBeam {
    beam: BeamParams,
    profile: ShiftProfile,
    /// Shifts at 1 W/m², rad/s.
    per_intensity: ShiftResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutModel {
    pub scheme: LevelScheme,
    pub cavity: CavityParams,
    pub excitation: BeamParams,
    /// `Ω²/I` of the excitation beam, rad²/s² per W/m², calibration included.
    drive_rabi_per_intensity: f64,
    shift: Option<ShiftBeam>,
    /// Drive minus bare ¹S₀–³P₁ frequency, rad/s.
    excitation_detuning: f64,
}

impl ReadoutModel {
    pub fn new(config: &SimConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let scheme = build_level_scheme(&config.level)?;
        let cavity = CavityParams::from_config(&config.cavity)?;
        let excitation = config.excitation.beam.clone();

        // Γ = 2γ for the 556 nm line.
        let gamma_line = 2.0 * scheme.gamma_p1;
        let isat = saturation_intensity(scheme.p1_wavelength, gamma_line);
        let drive_rabi_per_intensity =
            config.excitation.intensity_calibration * gamma_line * gamma_line / (2.0 * isat);

        let shift = if config.light_shift.enabled {
            let beam = config.light_shift.beam.clone();
            let c32 = shift_components(Half::THREE_HALVES, &beam, &scheme, 1.0)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
            let c12 = shift_components(Half::HALF, &beam, &scheme, 1.0)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
            Some(ShiftBeam {
                beam,
                profile: config.light_shift.profile,
                per_intensity: ShiftResult::new(c32.iter().sum(), c12.iter().sum()),
            })
        } else {
            None
        };

        let mut model = ReadoutModel {
            scheme,
            cavity,
            excitation,
            drive_rabi_per_intensity,
            shift,
            excitation_detuning: 0.0,
        };
        let mut detuning = model.excitation.detuning();
        if config.excitation.lock_to_shifted_resonance {
            detuning += model.peak_shift().delta_32;
        }
        model.excitation_detuning = detuning;
        Ok(model)
    }

    pub fn light_shift_enabled(&self) -> bool {
        self.shift.is_some()
    }

    /// Resolved drive detuning from the bare line, rad/s.
    pub fn excitation_detuning(&self) -> f64 {
        self.excitation_detuning
    }

    /// Same model with the drive at `detuning_mhz` from the bare line.
    pub fn with_excitation_detuning_mhz(&self, detuning_mhz: f64) -> Self {
        ReadoutModel {
            excitation_detuning: mhz_to_angular(detuning_mhz),
            ..self.clone()
        }
    }

    /// Shifts on the light-shift beam axis (zero when disabled).
    pub fn peak_shift(&self) -> ShiftResult {
        match &self.shift {
            Some(s) => s.per_intensity.scaled(s.beam.peak_intensity()),
            None => ShiftResult::ZERO,
        }
    }

    pub fn shifts_at(&self, position: [f64; 3]) -> ShiftResult {
        match &self.shift {
            None => ShiftResult::ZERO,
            Some(s) => match s.profile {
                ShiftProfile::Uniform => s.per_intensity.scaled(s.beam.peak_intensity()),
                ShiftProfile::Gaussian => {
                    let i = beam_intensity(s.beam.radial_offset(position), &s.beam);
                    s.per_intensity.scaled(i)
                }
            },
        }
    }

    /// Drive Ω² per polarization component (σ⁺, π, σ⁻) at `position`.
    pub fn drive_rabi_squared_at(&self, position: [f64; 3]) -> [f64; 3] {
        let i = beam_intensity(self.excitation.radial_offset(position), &self.excitation);
        let total = self.drive_rabi_per_intensity * i;
        self.excitation.polarization.components().map(|f| f * total)
    }

    pub fn conditions_at(&self, position: [f64; 3]) -> LocalConditions {
        LocalConditions {
            coupling: self.cavity.coupling(position),
            drive_rabi_squared: self.drive_rabi_squared_at(position),
            excitation_detuning: self.excitation_detuning,
            cavity_detuning: self.cavity.cavity_detuning,
            shifts: self.shifts_at(position),
        }
    }

    pub fn rates_at(&self, spin: Spin, position: [f64; 3]) -> EmissionRates {
        adiabatic_rates(spin, &self.conditions_at(position), &self.cavity)
    }

    pub fn dark_rate(&self, mode: Polarization) -> f64 {
        self.cavity.dark_rate(mode)
    }
}
