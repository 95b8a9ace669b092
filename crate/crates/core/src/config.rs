//! Aggregate simulation configuration. Every default is the experiment's
//! nominal value unless the field notes a calibration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atomic::LevelConfig;
use crate::lightshift::{BeamParams, BeamPolarization, DetuningReference};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("{0}")]
    Invalid(String),
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::NonPositive { name, value })
    }
}

pub(crate) fn require_nonnegative(name: &'static str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ConfigError::OutOfRange {
            name,
            value,
            range: "[0, ∞)",
        })
    }
}

pub(crate) fn require_unit_interval(name: &'static str, value: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ConfigError::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        })
    }
}

/// Calibrated RMS of the axial standing-wave factor on g.
pub const DEFAULT_AXIAL_COUPLING_FACTOR: f64 = 0.4731;
/// Calibrated scale on the textbook 556 nm Rabi frequency squared.
pub const DEFAULT_DRIVE_INTENSITY_CALIBRATION: f64 = 2.629;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CavityConfig {
    /// Peak atom-cavity coupling g₀/2π, MHz.
    pub g0_mhz: f64,
    /// Cavity field decay rate κ/2π (HWHM), MHz.
    pub kappa_mhz: f64,
    /// Atomic dipole decay rate γ/2π (half the natural linewidth), MHz.
    pub gamma_mhz: f64,
    pub mode_waist_um: f64,
    /// Multiplies g₀ to account for the unresolved axial standing wave.
    pub axial_coupling_factor: f64,
    /// Cavity resonance minus excitation laser frequency, MHz.
    pub cavity_drive_detuning_mhz: f64,
    pub detection_efficiency: f64,
    pub dark_rate_sigma_plus_per_ms: f64,
    pub dark_rate_sigma_minus_per_ms: f64,
}

impl Default for CavityConfig {
    fn default() -> Self {
        CavityConfig {
            g0_mhz: 2.8,
            kappa_mhz: 4.8,
            gamma_mhz: 0.091,
            mode_waist_um: 19.0,
            axial_coupling_factor: DEFAULT_AXIAL_COUPLING_FACTOR,
            cavity_drive_detuning_mhz: 0.0,
            detection_efficiency: 0.20,
            dark_rate_sigma_plus_per_ms: 1.0,
            dark_rate_sigma_minus_per_ms: 0.5,
        }
    }
}

impl CavityConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        require_positive("g0_mhz", self.g0_mhz)?;
        require_positive("kappa_mhz", self.kappa_mhz)?;
        require_positive("gamma_mhz", self.gamma_mhz)?;
        require_positive("mode_waist_um", self.mode_waist_um)?;
        require_unit_interval("axial_coupling_factor", self.axial_coupling_factor)?;
        if !self.cavity_drive_detuning_mhz.is_finite() {
            return Err(ConfigError::Invalid("cavity_drive_detuning_mhz must be finite".into()));
        }
        require_unit_interval("detection_efficiency", self.detection_efficiency)?;
        require_nonnegative("dark_rate_sigma_plus_per_ms", self.dark_rate_sigma_plus_per_ms)?;
        require_nonnegative("dark_rate_sigma_minus_per_ms", self.dark_rate_sigma_minus_per_ms)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExcitationConfig {
    pub beam: BeamParams,
    /// When set, `beam.detuning_mhz` is taken relative to the light-shifted
    /// m′=±3/2 resonance at the light-shift beam center instead of the bare
    /// line.
    pub lock_to_shifted_resonance: bool,
    pub intensity_calibration: f64,
}

impl Default for ExcitationConfig {
    fn default() -> Self {
        ExcitationConfig {
            beam: BeamParams::excitation_default(),
            lock_to_shifted_resonance: true,
            intensity_calibration: DEFAULT_DRIVE_INTENSITY_CALIBRATION,
        }
    }
}

impl ExcitationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.beam.validate()?;
        if self.beam.reference != DetuningReference::P1 {
            return Err(ConfigError::Invalid(
                "excitation detuning must be referenced to the ¹S₀–³P₁ line".into(),
            ));
        }
        if self.beam.polarization == BeamPolarization::Pi {
            return Err(ConfigError::Invalid(
                "a π-polarized excitation beam does not couple to the cavity transitions".into(),
            ));
        }
        require_positive("intensity_calibration", self.intensity_calibration)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftProfile {
    Gaussian,
    /// Every atom sees the beam-center shift.
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LightShiftConfig {
    pub enabled: bool,
    pub beam: BeamParams,
    pub profile: ShiftProfile,
}

impl Default for LightShiftConfig {
    fn default() -> Self {
        LightShiftConfig {
            enabled: true,
            beam: BeamParams::light_shift_default(),
            profile: ShiftProfile::Gaussian,
        }
    }
}

impl LightShiftConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.beam.validate()?;
        if self.beam.reference == DetuningReference::P1 {
            return Err(ConfigError::Invalid(
                "light-shift detuning must be referenced to a ³D₁ hyperfine component".into(),
            ));
        }
        if self.beam.polarization != BeamPolarization::Pi {
            return Err(ConfigError::Invalid("light-shift beam must be π-polarized".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    /// Fall height from the MOT to the cavity axis, mm.
    pub drop_height_mm: f64,
    /// Impact points are uniform over a disc of this many mode waists.
    pub impact_radius_waists: f64,
    /// Simulated path extends this far on either side of the cavity axis, µm.
    pub half_span_um: f64,
    /// Rate-integration step, µs.
    pub time_step_us: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            drop_height_mm: 7.0,
            impact_radius_waists: 2.0,
            half_span_um: 75.0,
            time_step_us: 1.0,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        require_positive("drop_height_mm", self.drop_height_mm)?;
        require_nonnegative("impact_radius_waists", self.impact_radius_waists)?;
        require_positive("half_span_um", self.half_span_um)?;
        require_positive("time_step_us", self.time_step_us)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CountingConfig {
    pub window_ms: f64,
    /// Mean atom arrivals per ms.
    pub atom_rate_per_ms: f64,
}

impl Default for CountingConfig {
    fn default() -> Self {
        // about 1.1 atoms per 2 ms window
        CountingConfig {
            window_ms: 2.0,
            atom_rate_per_ms: 0.55,
        }
    }
}

impl CountingConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        require_positive("window_ms", self.window_ms)?;
        require_nonnegative("atom_rate_per_ms", self.atom_rate_per_ms)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Fock-space cutoff per cavity mode for the full master equation.
    pub n_max: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { n_max: 2 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub level: LevelConfig,
    pub cavity: CavityConfig,
    pub excitation: ExcitationConfig,
    pub light_shift: LightShiftConfig,
    pub geometry: GeometryConfig,
    pub counting: CountingConfig,
    pub model: ModelConfig,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        crate::atomic::build_level_scheme(&self.level)?;
        self.cavity.validate()?;
        self.excitation.validate()?;
        self.light_shift.validate()?;
        self.geometry.validate()?;
        self.counting.validate()?;
        if self.model.n_max < 1 {
            return Err(ConfigError::Invalid("n_max must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_light_shift(mut self, enabled: bool) -> Self {
        self.light_shift.enabled = enabled;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn json_roundtrip() {
        let cfg = SimConfig::default();
        let s = serde_json::to_string(&cfg).unwrap();
        let back: SimConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let back: SimConfig = serde_json::from_str(r#"{"cavity": {"kappa_mhz": 5.0}}"#).unwrap();
        assert_eq!(back.cavity.kappa_mhz, 5.0);
        assert_eq!(back.cavity.g0_mhz, 2.8);
        assert_eq!(back.level, LevelConfig::default());
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = SimConfig::default();
        cfg.cavity.detection_efficiency = 1.5;
        assert!(matches!(cfg.validate(), Err(ConfigError::OutOfRange { .. })));
        let mut cfg = SimConfig::default();
        cfg.light_shift.beam.waist_m = 0.0;
        assert!(matches!(cfg.validate(), Err(ConfigError::NonPositive { .. })));
        let mut cfg = SimConfig::default();
        cfg.light_shift.beam.polarization = BeamPolarization::LinearY;
        assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))));
        let mut cfg = SimConfig::default();
        cfg.model.n_max = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<SimConfig>(r#"{"cavity": {"kapa_mhz": 5.0}}"#).is_err());
    }
}
