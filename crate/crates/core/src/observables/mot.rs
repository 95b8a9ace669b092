use serde::{Deserialize, Serialize};

use crate::units::{mhz_to_angular, saturation_intensity, TWO_PI};

/// MOT loading/loss model with a 1539 nm probe depleting atoms via ³D₁ → ³P₀.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotParams {
    /// Loading rate R, atoms/s. Cancels in the normalized profile.
    pub loading_rate: f64,
    /// One-body loss rate Γ₀, 1/s.
    pub gamma0: f64,
    /// Probe intensity, W/m².
    pub probe_intensity: f64,
    /// ³P₁–³D₁ natural linewidth, Hz.
    pub linewidth_hz: f64,
    pub wavelength_m: f64,
    /// ³D₁ → ³P₀ branching ratio.
    pub branching: f64,
    /// Fraction of MOT atoms in ³P₁.
    pub p1_population: f64,
}

impl Default for MotParams {
    fn default() -> Self {
        MotParams {
            loading_rate: 1e6,
            gamma0: 0.5,
            // 3 mW/cm²
            probe_intensity: 30.0,
            linewidth_hz: 16e3,
            wavelength_m: 1539e-9,
            branching: 0.64,
            p1_population: 0.5,
        }
    }
}

impl MotParams {
    pub fn validate(&self) -> Result<(), crate::ConfigError> {
        use crate::config::{require_nonnegative, require_positive, require_unit_interval};
        require_nonnegative("loading_rate", self.loading_rate)?;
        require_positive("gamma0", self.gamma0)?;
        require_nonnegative("probe_intensity", self.probe_intensity)?;
        require_positive("linewidth_hz", self.linewidth_hz)?;
        require_positive("wavelength_m", self.wavelength_m)?;
        require_unit_interval("branching", self.branching)?;
        require_unit_interval("p1_population", self.p1_population)
    }

    /// η: loss probability per scattered probe photon.
    pub fn eta(&self) -> f64 {
        self.p1_population * self.branching
    }

    fn gamma_line(&self) -> f64 {
        TWO_PI * self.linewidth_hz
    }

    pub fn saturation_parameter(&self) -> f64 {
        self.probe_intensity / saturation_intensity(self.wavelength_m, self.gamma_line())
    }

    /// Saturated two-level scattering rate Γ₁ at `detuning_mhz`, 1/s.
    pub fn scattering_rate(&self, detuning_mhz: f64) -> f64 {
        let g = self.gamma_line();
        let s = self.saturation_parameter();
        let d = mhz_to_angular(detuning_mhz);
        0.5 * g * s / (1.0 + s + 4.0 * d * d / (g * g))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DipPoint {
    pub detuning_mhz: f64,
    pub normalized_n: f64,
}

/// Steady state of `dN/dt = R - (Γ₀ + ηΓ₁)N` relative to the far-detuned
/// value `R/Γ₀`.
pub fn mot_dip_profile(detuning_grid_mhz: &[f64], mot: &MotParams) -> Vec<DipPoint> {
    let eta = mot.eta();
    detuning_grid_mhz
        .iter()
        .map(|&d| {
            let loss = if eta == 0.0 { 0.0 } else { eta * mot.scattering_rate(d) };
            DipPoint {
                detuning_mhz: d,
                normalized_n: mot.gamma0 / (mot.gamma0 + loss),
            }
        })
        .collect()
}

/// Half width at half depth of the dip, MHz, from the closed form of the
/// profile. `None` when the dip is absent.
pub fn dip_hwhm_mhz(mot: &MotParams) -> Option<f64> {
    let eta = mot.eta();
    let peak = eta * mot.scattering_rate(0.0);
    if peak <= 0.0 {
        return None;
    }
    // depth(Δ) = ηΓ₁/(Γ₀+ηΓ₁); half depth ⇔ ηΓ₁(Δ) = Γ₀·L/(2Γ₀+L), L = ηΓ₁(0)
    let target = mot.gamma0 * peak / (2.0 * mot.gamma0 + peak);
    let g = mot.gamma_line();
    let s = mot.saturation_parameter();
    // 0.5 g s η / (1 + s + 4Δ²/g²) = target
    let lhs = 0.5 * g * s * eta / target - 1.0 - s;
    (lhs > 0.0).then(|| crate::units::angular_to_mhz(0.5 * g * lhs.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_eta_is_flat() {
        let mot = MotParams {
            p1_population: 0.0,
            ..MotParams::default()
        };
        let grid: Vec<f64> = (-50..=50).map(|k| k as f64 * 10.0).collect();
        assert!(mot_dip_profile(&grid, &mot).iter().all(|p| p.normalized_n == 1.0));
        assert_eq!(dip_hwhm_mhz(&mot), None);
    }

    #[test]
    fn half_value_where_losses_balance() {
        let mot = MotParams::default();
        // find Δ with ηΓ₁ = Γ₀ by bisection, then N/N₀ must be 1/2
        let f = |d: f64| mot.eta() * mot.scattering_rate(d) - mot.gamma0;
        let (mut lo, mut hi) = (0.0, 1e4);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        let v = mot_dip_profile(&[lo], &mot)[0].normalized_n;
        assert!((v - 0.5).abs() < 1e-9);
    }

    #[test]
    fn hwhm_matches_profile() {
        let mot = MotParams::default();
        let h = dip_hwhm_mhz(&mot).unwrap();
        let p = mot_dip_profile(&[0.0, h], &mot);
        let depth0 = 1.0 - p[0].normalized_n;
        let depth_h = 1.0 - p[1].normalized_n;
        assert!((depth_h / depth0 - 0.5).abs() < 1e-9);
    }
}
