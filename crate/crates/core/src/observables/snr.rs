use serde::{Deserialize, Serialize};

use crate::atomic::{Polarization, Spin};
use crate::config::{ConfigError, SimConfig};
use crate::transit::{expected_counts, CountRecord, DiscQuadrature, Simulation, TransitRecord};

/// Desired over undesired counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Snr {
    Finite(f64),
    /// Undesired channel empty, desired not.
    Infinite,
    /// Both channels empty.
    Undefined,
}

impl Snr {
    pub fn value(self) -> Option<f64> {
        match self {
            Snr::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Finite value, `+∞` or NaN, for tabulation.
    pub fn as_f64(self) -> f64 {
        match self {
            Snr::Finite(v) => v,
            Snr::Infinite => f64::INFINITY,
            Snr::Undefined => f64::NAN,
        }
    }
}

pub fn snr_from_totals(desired: f64, undesired: f64) -> Snr {
    if undesired > 0.0 {
        Snr::Finite(desired / undesired)
    } else if desired > 0.0 {
        Snr::Infinite
    } else {
        Snr::Undefined
    }
}

/// Anything carrying a (σ⁺, σ⁻) count pair.
pub trait CountPair {
    fn pair(&self) -> [u64; 2];
}

impl CountPair for TransitRecord {
    fn pair(&self) -> [u64; 2] {
        [self.counts_sigma_plus, self.counts_sigma_minus]
    }
}

impl CountPair for CountRecord {
    fn pair(&self) -> [u64; 2] {
        [self.counts_sigma_plus, self.counts_sigma_minus]
    }
}

impl CountPair for [u64; 2] {
    fn pair(&self) -> [u64; 2] {
        *self
    }
}

fn desired_index(spin: Spin) -> usize {
    match spin.desired_polarization() {
        Polarization::SigmaPlus => 0,
        _ => 1,
    }
}

/// Total counts in the polarization `initial_spin` should produce over the
/// total in the other one (σ⁺/σ⁻ for ↑).
pub fn snr_from_counts<T: CountPair>(records: &[T], initial_spin: Spin) -> Snr {
    let mut tot = [0u64; 2];
    for r in records {
        let p = r.pair();
        tot[0] += p[0];
        tot[1] += p[1];
    }
    let d = desired_index(initial_spin);
    snr_from_totals(tot[d] as f64, tot[1 - d] as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectedCounts {
    pub counts: [f64; 2],
    /// Set where the expected dark counts exceeded the raw counts.
    pub clamped: [bool; 2],
}

/// Subtracts `rate × exposure` dark counts (rates in 1/s, exposure in s)
/// from each channel, clamping at zero.
pub fn dark_count_correct(counts: [f64; 2], dark_rates: [f64; 2], exposure: f64) -> CorrectedCounts {
    assert!(exposure > 0.0, "exposure must be positive");
    let mut out = CorrectedCounts {
        counts,
        clamped: [false; 2],
    };
    for m in 0..2 {
        let v = counts[m] - dark_rates[m] * exposure;
        if v < 0.0 {
            out.counts[m] = 0.0;
            out.clamped[m] = true;
        } else {
            out.counts[m] = v;
        }
    }
    out
}

/// Dark-count-free SNR from the expected per-atom counts.
pub fn predicted_snr(sim: &Simulation, initial_spin: Spin, quadrature: &DiscQuadrature) -> Snr {
    let c = expected_counts(sim, initial_spin, quadrature);
    let d = desired_index(initial_spin);
    snr_from_totals(c.emitted[d], c.emitted[1 - d])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    /// Swept parameter (mW or µm).
    pub x: f64,
    pub snr: f64,
    pub counts_per_atom: f64,
}

fn sweep_point(config: &SimConfig, x: f64, spin: Spin, quadrature: &DiscQuadrature) -> Result<SnrPoint, ConfigError> {
    let sim = Simulation::new(config)?;
    let c = expected_counts(&sim, spin, quadrature);
    let d = desired_index(spin);
    Ok(SnrPoint {
        x,
        snr: snr_from_totals(c.emitted[d], c.emitted[1 - d]).as_f64(),
        counts_per_atom: c.total_detected(),
    })
}

/// SNR against light-shift power (mW) with everything else from `config`.
/// A zero power keeps the beam in the model but with no effect.
pub fn predicted_snr_vs_power(
    powers_mw: &[f64],
    config: &SimConfig,
    spin: Spin,
    quadrature: &DiscQuadrature,
) -> Result<Vec<SnrPoint>, ConfigError> {
    powers_mw
        .iter()
        .map(|&p| {
            let mut c = config.clone();
            c.light_shift.enabled = true;
            c.light_shift.beam.power_w = p * 1e-3;
            sweep_point(&c, p, spin, quadrature)
        })
        .collect()
}

/// SNR against light-shift waist (µm) at the peak intensity of `config`'s
/// beam.
pub fn predicted_snr_vs_waist(
    waists_um: &[f64],
    config: &SimConfig,
    spin: Spin,
    quadrature: &DiscQuadrature,
) -> Result<Vec<SnrPoint>, ConfigError> {
    waists_um
        .iter()
        .map(|&w| {
            if !(w > 0.0) {
                return Err(ConfigError::NonPositive { name: "waist_um", value: w });
            }
            let mut c = config.clone();
            c.light_shift.enabled = true;
            c.light_shift.beam = c.light_shift.beam.with_waist_at_constant_peak(w * 1e-6);
            sweep_point(&c, w, spin, quadrature)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_flags() {
        assert_eq!(snr_from_totals(5.0, 5.0), Snr::Finite(1.0));
        assert_eq!(snr_from_totals(5.0, 0.0), Snr::Infinite);
        assert_eq!(snr_from_totals(0.0, 0.0), Snr::Undefined);
    }

    #[test]
    fn snr_orientation_follows_spin() {
        let recs = [[8u64, 2], [4, 1]];
        assert_eq!(snr_from_counts(&recs, Spin::Up), Snr::Finite(4.0));
        assert_eq!(snr_from_counts(&recs, Spin::Down), Snr::Finite(0.25));
    }

    #[test]
    fn zero_dark_rate_is_identity() {
        let c = dark_count_correct([4.2, 1.0], [0.0, 0.0], 2e-3);
        assert_eq!(c.counts, [4.2, 1.0]);
        assert_eq!(c.clamped, [false, false]);
    }

    #[test]
    fn clamps_below_dark_level() {
        let c = dark_count_correct([0.5, 3.0], [1e3, 5e2], 2e-3);
        assert_eq!(c.counts, [0.0, 2.0]);
        assert_eq!(c.clamped, [true, false]);
    }
}
