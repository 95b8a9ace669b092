//! AC Stark shifts of ³P₁(F′=3/2) sublevels induced by a π-polarized beam
//! near the ³P₁–³D₁ transition.
//!
//! Geometry convention shared with the rest of the crate: the cavity axis
//! (and the quantization axis) is `z`, the excitation and light-shift beams
//! propagate along `x`, and atoms fall along `-y`. A beam's transverse offset
//! at `(x, y, z)` is therefore `√(y² + (z - axis_offset)²)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atomic::LevelScheme;
use crate::half::Half;
use crate::units::{angular_to_mhz, mhz_to_angular, rabi_squared};
use crate::wigner::{six_j, three_j};

#[derive(Debug, Error, PartialEq)]
pub enum LightShiftError {
    #[error("sublevel m′ = {0} is not a ³P₁(F′=3/2) projection")]
    InvalidSublevel(Half),
    #[error("light-shift model needs a π-polarized beam, got {0:?}")]
    UnsupportedPolarization(BeamPolarization),
    #[error(
        "detuning {detuning_mhz:.4} MHz from ³D₁(F′={f}) is inside the resonance floor of {floor_mhz:.4} MHz"
    )]
    Singular {
        f: Half,
        detuning_mhz: f64,
        floor_mhz: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamPolarization {
    Pi,
    SigmaPlus,
    SigmaMinus,
    /// Linear, perpendicular to the quantization axis: equal σ⁺ and σ⁻ parts.
    LinearY,
}

impl BeamPolarization {
    /// Intensity fractions carried by the (σ⁺, π, σ⁻) components.
    pub fn components(self) -> [f64; 3] {
        match self {
            BeamPolarization::Pi => [0.0, 1.0, 0.0],
            BeamPolarization::SigmaPlus => [1.0, 0.0, 0.0],
            BeamPolarization::SigmaMinus => [0.0, 0.0, 1.0],
            BeamPolarization::LinearY => [0.5, 0.0, 0.5],
        }
    }
}

/// Transition a beam's detuning is quoted against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetuningReference {
    /// Unshifted ¹S₀–³P₁(F′=3/2) resonance.
    P1,
    /// ³P₁(F′=3/2)–³D₁(F′=1/2).
    D1F12,
    /// ³P₁(F′=3/2)–³D₁(F′=3/2).
    D1F32,
}

/// A Gaussian beam (TEM₀₀ transverse profile, no Rayleigh divergence).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamParams {
    pub power_w: f64,
    /// 1/e² intensity radius, m.
    pub waist_m: f64,
    /// Laser minus transition frequency, MHz (negative = red).
    pub detuning_mhz: f64,
    pub reference: DetuningReference,
    pub polarization: BeamPolarization,
    /// Transverse displacement of the beam axis along the cavity axis, m.
    #[serde(default)]
    pub axis_offset_m: f64,
}

impl BeamParams {
    /// The 1539 nm beam: 9 mW, w_l = 50 µm, 300 MHz red of ³D₁(F′=1/2).
    pub fn light_shift_default() -> Self {
        BeamParams {
            power_w: 9e-3,
            waist_m: 50e-6,
            detuning_mhz: -300.0,
            reference: DetuningReference::D1F12,
            polarization: BeamPolarization::Pi,
            axis_offset_m: 0.0,
        }
    }

    /// The 556 nm excitation beam: 1.8 µW, w_e = 25 µm, y-polarized.
    pub fn excitation_default() -> Self {
        BeamParams {
            power_w: 1.8e-6,
            waist_m: 25e-6,
            detuning_mhz: 0.0,
            reference: DetuningReference::P1,
            polarization: BeamPolarization::LinearY,
            axis_offset_m: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), crate::ConfigError> {
        use crate::ConfigError;
        if !(self.power_w.is_finite() && self.power_w >= 0.0) {
            return Err(ConfigError::OutOfRange {
                name: "power_w",
                value: self.power_w,
                range: "[0, ∞)",
            });
        }
        if !(self.waist_m.is_finite() && self.waist_m > 0.0) {
            return Err(ConfigError::NonPositive {
                name: "waist_m",
                value: self.waist_m,
            });
        }
        if !self.detuning_mhz.is_finite() || !self.axis_offset_m.is_finite() {
            return Err(ConfigError::Invalid(
                "beam detuning and axis offset must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn peak_intensity(&self) -> f64 {
        2.0 * self.power_w / (PI * self.waist_m * self.waist_m)
    }

    pub fn detuning(&self) -> f64 {
        mhz_to_angular(self.detuning_mhz)
    }

    /// Transverse distance of `position` from this beam's axis.
    pub fn radial_offset(&self, position: [f64; 3]) -> f64 {
        let dz = position[2] - self.axis_offset_m;
        (position[1] * position[1] + dz * dz).sqrt()
    }

    /// Same beam with the power rescaled to keep the peak intensity when the
    /// waist changes to `waist_m`.
    pub fn with_waist_at_constant_peak(&self, waist_m: f64) -> Self {
        let scale = (waist_m / self.waist_m).powi(2);
        BeamParams {
            power_w: self.power_w * scale,
            waist_m,
            ..self.clone()
        }
    }
}

/// `I(r) = 2P/(πw²) · exp(-2r²/w²)` in W/m².
pub fn beam_intensity(radial_offset: f64, beam: &BeamParams) -> f64 {
    let w2 = beam.waist_m * beam.waist_m;
    beam.peak_intensity() * (-2.0 * radial_offset * radial_offset / w2).exp()
}

/// Light shifts of the m′ = ±3/2 and m′ = ±1/2 pairs, rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftResult {
    pub delta_32: f64,
    pub delta_12: f64,
    pub splitting: f64,
}

impl ShiftResult {
    pub fn new(delta_32: f64, delta_12: f64) -> Self {
        ShiftResult {
            delta_32,
            delta_12,
            splitting: delta_32 - delta_12,
        }
    }

    pub const ZERO: ShiftResult = ShiftResult {
        delta_32: 0.0,
        delta_12: 0.0,
        splitting: 0.0,
    };

    /// Shift of ³P₁ sublevel `m` (rad/s). `m` must be a valid projection.
    pub fn for_sublevel(&self, m: Half) -> f64 {
        if m.abs() == Half::THREE_HALVES {
            self.delta_32
        } else {
            self.delta_12
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ShiftResult::new(self.delta_32 * factor, self.delta_12 * factor)
    }

    pub fn delta_32_mhz(&self) -> f64 {
        angular_to_mhz(self.delta_32)
    }

    pub fn delta_12_mhz(&self) -> f64 {
        angular_to_mhz(self.delta_12)
    }

    pub fn splitting_mhz(&self) -> f64 {
        angular_to_mhz(self.splitting)
    }
}

const J_P1: Half = Half::ONE;
const J_D1: Half = Half::ONE;
const NUCLEAR_SPIN: Half = Half::HALF;
const F_P1: Half = Half::THREE_HALVES;
const D1_HYPERFINE: [Half; 2] = [Half::HALF, Half::THREE_HALVES];

/// Relative π line strength from ³P₁(F=3/2, m) to ³D₁(F′, m), normalized so
/// that the strengths out of one sublevel summed over F′ and all
/// polarizations equal 1.
pub fn hyperfine_pi_strength(m: Half, f_upper: Half) -> f64 {
    let tj = three_j(f_upper, Half::ONE, F_P1, -m, Half::ZERO, m);
    let sj = six_j(J_D1, f_upper, NUCLEAR_SPIN, F_P1, J_P1, Half::ONE);
    let dims = ((J_P1.twice() + 1) * (f_upper.twice() + 1) * (F_P1.twice() + 1)) as f64;
    dims * tj * tj * sj * sj
}

/// Detuning (rad/s) of the beam from ³P₁(F′=3/2) → ³D₁(F′ = `f_upper`).
pub fn detuning_from_component(beam: &BeamParams, scheme: &LevelScheme, f_upper: Half) -> f64 {
    // d1_hyperfine_splitting = E(F′=1/2) - E(F′=3/2)
    let laser_minus_f12 = match beam.reference {
        DetuningReference::D1F12 => beam.detuning(),
        DetuningReference::D1F32 => beam.detuning() - scheme.d1_hyperfine_splitting,
        // P1-referenced beams are not near the 1539 nm line.
        DetuningReference::P1 => f64::INFINITY,
    };
    if f_upper == Half::HALF {
        laser_minus_f12
    } else {
        laser_minus_f12 + scheme.d1_hyperfine_splitting
    }
}

/// Squared resonant ³P₁–³D₁ Rabi frequency at unit line strength, rad²/s².
pub fn reference_rabi_squared(intensity: f64, scheme: &LevelScheme) -> f64 {
    scheme.p1_d1_geometric_factor * rabi_squared(intensity, scheme.d1_wavelength, scheme.gamma_d1_line)
}

fn check_p1_projection(m: Half) -> Result<(), LightShiftError> {
    if !m.is_integer() && m.abs() <= F_P1 {
        Ok(())
    } else {
        Err(LightShiftError::InvalidSublevel(m))
    }
}

/// Per-hyperfine-component contributions `Ω²/(4Δ_k)` to the shift of m′, at
/// intensity `intensity`.
pub fn shift_components(
    m: Half,
    beam: &BeamParams,
    scheme: &LevelScheme,
    intensity: f64,
) -> Result<[f64; 2], LightShiftError> {
    check_p1_projection(m)?;
    if beam.polarization != BeamPolarization::Pi {
        return Err(LightShiftError::UnsupportedPolarization(beam.polarization));
    }
    let omega2 = reference_rabi_squared(intensity, scheme);
    let floor = scheme.resonance_floor();
    let mut out = [0.0; 2];
    for (slot, &f) in out.iter_mut().zip(D1_HYPERFINE.iter()) {
        let strength = hyperfine_pi_strength(m, f);
        if strength == 0.0 {
            continue;
        }
        let detuning = detuning_from_component(beam, scheme, f);
        if detuning.abs() < floor {
            return Err(LightShiftError::Singular {
                f,
                detuning_mhz: angular_to_mhz(detuning),
                floor_mhz: angular_to_mhz(floor),
            });
        }
        *slot = omega2 * strength / (4.0 * detuning);
    }
    Ok(out)
}

/// Light shift (rad/s) of ³P₁(F′=3/2, m′) at `position`.
pub fn stark_shift(
    m: Half,
    beam: &BeamParams,
    scheme: &LevelScheme,
    position: [f64; 3],
) -> Result<f64, LightShiftError> {
    let intensity = beam_intensity(beam.radial_offset(position), beam);
    Ok(shift_components(m, beam, scheme, intensity)?.iter().sum())
}

/// Both shifts at `position`.
pub fn shifts_at(
    beam: &BeamParams,
    scheme: &LevelScheme,
    position: [f64; 3],
) -> Result<ShiftResult, LightShiftError> {
    Ok(ShiftResult::new(
        stark_shift(Half::THREE_HALVES, beam, scheme, position)?,
        stark_shift(Half::HALF, beam, scheme, position)?,
    ))
}

/// δ±1/2 / δ±3/2 fixed by the hyperfine line strengths and detunings.
pub fn shift_ratio(beam: &BeamParams, scheme: &LevelScheme) -> Result<f64, LightShiftError> {
    let c32 = shift_components(Half::THREE_HALVES, beam, scheme, 1.0)?;
    let c12 = shift_components(Half::HALF, beam, scheme, 1.0)?;
    Ok(c12.iter().sum::<f64>() / c32.iter().sum::<f64>())
}

/// Infers δ±1/2 from a measured δ±3/2 (rad/s) through the line-strength ratio.
pub fn sublevel_splitting(
    delta_32_measured: f64,
    scheme: &LevelScheme,
    beam: &BeamParams,
) -> Result<ShiftResult, LightShiftError> {
    let ratio = shift_ratio(beam, scheme)?;
    Ok(ShiftResult::new(delta_32_measured, ratio * delta_32_measured))
}

/// Pointwise [`shifts_at`] over `grid`.
pub fn shift_field(
    grid: &[[f64; 3]],
    beam: &BeamParams,
    scheme: &LevelScheme,
) -> Result<Vec<ShiftResult>, LightShiftError> {
    grid.iter().map(|&p| shifts_at(beam, scheme, p)).collect()
}

/// Result of the one-time light-shift calibration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LightShiftCalibration {
    pub geometric_factor: f64,
    /// E(³D₁ F′=1/2) - E(³D₁ F′=3/2), rad/s.
    pub d1_hyperfine_splitting: f64,
}

/// Solves for the ³D₁ hyperfine splitting that reproduces `target_ratio`
/// (= δ±1/2/δ±3/2) and the geometric factor that puts δ±3/2 at
/// `target_delta_32` (rad/s) on the axis of `beam`, which must be referenced
/// to ³D₁(F′=1/2).
pub fn calibrate(
    scheme: &LevelScheme,
    beam: &BeamParams,
    target_delta_32: f64,
    target_ratio: f64,
) -> LightShiftCalibration {
    assert_eq!(beam.reference, DetuningReference::D1F12);
    let s_a = hyperfine_pi_strength(Half::HALF, Half::HALF);
    let s_b = hyperfine_pi_strength(Half::HALF, Half::THREE_HALVES);
    let s_c = hyperfine_pi_strength(Half::THREE_HALVES, Half::THREE_HALVES);
    let det_12 = beam.detuning();
    let det_32 = det_12 * (target_ratio - s_b / s_c) * s_c / s_a;
    let splitting = det_32 - det_12;
    let omega2 = rabi_squared(beam.peak_intensity(), scheme.d1_wavelength, scheme.gamma_d1_line);
    LightShiftCalibration {
        geometric_factor: target_delta_32 * 4.0 * det_32 / (omega2 * s_c),
        d1_hyperfine_splitting: splitting,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::{build_level_scheme, LevelConfig};
    use crate::units::mhz_to_angular;

    fn scheme() -> LevelScheme {
        build_level_scheme(&LevelConfig::default()).unwrap()
    }

    const CENTER: [f64; 3] = [0.0; 3];

    #[test]
    fn peak_intensity_of_light_shift_beam() {
        let beam = BeamParams::light_shift_default();
        let i0 = beam_intensity(0.0, &beam);
        // 2 × 9 mW / (π × (50 µm)²)
        assert!((i0 / 2.291_831e6 - 1.0).abs() < 1e-6, "{i0}");
        let at_waist = beam_intensity(beam.waist_m, &beam);
        assert!((at_waist / i0 - (-2.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn zero_power_gives_zero_intensity() {
        let beam = BeamParams {
            power_w: 0.0,
            ..BeamParams::light_shift_default()
        };
        for r in [0.0, 1e-5, 1e-3] {
            assert_eq!(beam_intensity(r, &beam), 0.0);
        }
    }

    #[test]
    fn hyperfine_strengths() {
        assert!((hyperfine_pi_strength(Half::THREE_HALVES, Half::HALF)).abs() < 1e-15);
        assert!((hyperfine_pi_strength(Half::THREE_HALVES, Half::THREE_HALVES) - 0.5).abs() < 1e-14);
        assert!((hyperfine_pi_strength(Half::HALF, Half::HALF) - 1.0 / 9.0).abs() < 1e-14);
        assert!((hyperfine_pi_strength(Half::HALF, Half::THREE_HALVES) - 1.0 / 18.0).abs() < 1e-14);
    }

    #[test]
    fn frozen_calibration_matches_solver() {
        let s = scheme();
        let beam = BeamParams::light_shift_default();
        let cal = calibrate(&s, &beam, mhz_to_angular(6.8), -16.0 / 8.5);
        let splitting_mhz = angular_to_mhz(cal.d1_hyperfine_splitting);
        assert!(
            (splitting_mhz - crate::atomic::DEFAULT_D1_HYPERFINE_SPLITTING_MHZ).abs() < 1e-6,
            "{splitting_mhz}"
        );
        assert!(
            (cal.geometric_factor / crate::atomic::DEFAULT_P1_D1_GEOMETRIC_FACTOR - 1.0).abs() < 1e-9,
            "{}",
            cal.geometric_factor
        );
    }

    #[test]
    fn benchmark_shift_at_beam_center() {
        let s = scheme();
        let beam = BeamParams::light_shift_default();
        let d32 = stark_shift(Half::THREE_HALVES, &beam, &s, CENTER).unwrap();
        assert!((angular_to_mhz(d32) - 6.8).abs() < 1e-6);
        let d32m = stark_shift(Half::MINUS_THREE_HALVES, &beam, &s, CENTER).unwrap();
        assert_eq!(d32, d32m);
    }

    #[test]
    fn opposite_signs_at_operating_point() {
        let r = shifts_at(&BeamParams::light_shift_default(), &scheme(), CENTER).unwrap();
        assert!(r.delta_32 > 0.0 && r.delta_12 < 0.0);
        assert_eq!(r.splitting, r.delta_32 - r.delta_12);
    }

    #[test]
    fn far_detuning_shift_vanishes() {
        let beam = BeamParams {
            detuning_mhz: -1e12,
            ..BeamParams::light_shift_default()
        };
        let r = shifts_at(&beam, &scheme(), CENTER).unwrap();
        assert!(r.delta_32_mhz().abs() < 1e-5 && r.delta_12_mhz().abs() < 1e-5);
    }

    #[test]
    fn measured_shift_maps_to_splitting() {
        let s = scheme();
        let r = sublevel_splitting(mhz_to_angular(8.5), &s, &BeamParams::light_shift_default()).unwrap();
        assert!((r.delta_12_mhz() + 16.0).abs() < 1e-9);
        assert!((r.splitting_mhz() - 24.5).abs() < 1e-9);
    }

    #[test]
    fn splitting_is_linear_in_measured_shift() {
        let s = scheme();
        let beam = BeamParams::light_shift_default();
        let zero = sublevel_splitting(0.0, &s, &beam).unwrap();
        assert_eq!(zero.splitting, 0.0);
        let a = sublevel_splitting(mhz_to_angular(6.8), &s, &beam).unwrap();
        let expect = 24.5 / 8.5 * 6.8;
        assert!((a.splitting_mhz() - expect).abs() < 1e-9);
    }

    #[test]
    fn resonant_beam_is_singular() {
        let beam = BeamParams {
            detuning_mhz: 0.05,
            ..BeamParams::light_shift_default()
        };
        let err = stark_shift(Half::HALF, &beam, &scheme(), CENTER).unwrap_err();
        assert!(matches!(err, LightShiftError::Singular { .. }));
        // m′=3/2 does not couple to F′=1/2, so it stays regular there.
        assert!(stark_shift(Half::THREE_HALVES, &beam, &scheme(), CENTER).is_ok());
    }

    #[test]
    fn non_pi_beam_is_rejected() {
        let beam = BeamParams {
            polarization: BeamPolarization::SigmaPlus,
            ..BeamParams::light_shift_default()
        };
        assert!(stark_shift(Half::HALF, &beam, &scheme(), CENTER).is_err());
    }

    #[test]
    fn field_reduces_to_pointwise_and_peaks_at_center() {
        let s = scheme();
        let beam = BeamParams::light_shift_default();
        let w = beam.waist_m;
        let grid: Vec<[f64; 3]> = (-20..=20)
            .map(|k| [0.0, 0.0, k as f64 * 0.1 * w])
            .collect();
        let field = shift_field(&grid, &beam, &s).unwrap();
        let imax = field
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.delta_32.total_cmp(&b.1.delta_32))
            .unwrap()
            .0;
        assert_eq!(grid[imax][2], 0.0);
        let center = shifts_at(&beam, &s, CENTER).unwrap();
        assert_eq!(field[20], center);
        let at_w = shifts_at(&beam, &s, [0.0, w, 0.0]).unwrap();
        assert!((at_w.delta_32 / center.delta_32 - (-2.0f64).exp()).abs() < 1e-12);
        assert!((at_w.delta_12 / center.delta_12 - (-2.0f64).exp()).abs() < 1e-12);
    }
}
