use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use yb_readout::observables::MotParams;
use yb_readout::transit::{DiscQuadrature, Format};
use yb_readout::{ConfigError, SimConfig};

/// Everything a run needs: physics, grids, seeding and output.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub sim: SimConfig,
    pub mot: MotParams,
    pub grids: Grids,
    pub ensembles: Ensembles,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    pub spectrum_min_mhz: f64,
    pub spectrum_max_mhz: f64,
    pub spectrum_step_mhz: f64,
    /// Additional light-shift waists for the spectrum, at unchanged power.
    pub spectrum_extra_waists_um: Vec<f64>,
    pub snr_powers_mw: Vec<f64>,
    /// Waists for the SNR inset, at the configured beam's peak intensity.
    pub snr_waists_um: Vec<f64>,
    pub dip_min_mhz: f64,
    pub dip_max_mhz: f64,
    pub dip_step_mhz: f64,
    pub quadrature_rings: usize,
    pub quadrature_spokes: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            spectrum_min_mhz: -30.0,
            spectrum_max_mhz: 30.0,
            spectrum_step_mhz: 0.5,
            spectrum_extra_waists_um: vec![20.0],
            snr_powers_mw: (0..=20).map(f64::from).collect(),
            snr_waists_um: vec![10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 80.0, 100.0],
            dip_min_mhz: -400.0,
            dip_max_mhz: 400.0,
            dip_step_mhz: 5.0,
            quadrature_rings: 16,
            quadrature_spokes: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ensembles {
    /// Measurement windows per spin and light-shift setting for `scatter`.
    pub scatter_windows: usize,
    /// Measurement windows per spin for `transit`.
    pub transit_windows: usize,
}

impl Default for Ensembles {
    fn default() -> Self {
        Ensembles {
            scatter_windows: 1000,
            transit_windows: 10_000,
        }
    }
}

/// Inclusive grid `min, min + step, …` up to `max` (within rounding).
pub fn linear_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, ConfigError> {
    if !(step > 0.0) || !(max >= min) || !min.is_finite() || !max.is_finite() {
        return Err(ConfigError::Invalid(format!("bad grid [{min}, {max}] step {step}")));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| min + step * i as f64).collect())
}

impl Grids {
    pub fn validate(&self) -> Result<(), ConfigError> {
        linear_grid(self.spectrum_min_mhz, self.spectrum_max_mhz, self.spectrum_step_mhz)?;
        linear_grid(self.dip_min_mhz, self.dip_max_mhz, self.dip_step_mhz)?;
        if self.quadrature_rings == 0 || self.quadrature_spokes == 0 {
            return Err(ConfigError::Invalid("quadrature needs at least one ring and spoke".into()));
        }
        for &p in &self.snr_powers_mw {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(ConfigError::Invalid(format!("power {p} mW")));
            }
        }
        if self.snr_powers_mw.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::Invalid("snr_powers_mw must be strictly increasing".into()));
        }
        for &w in self.snr_waists_um.iter().chain(&self.spectrum_extra_waists_um) {
            if !(w > 0.0 && w.is_finite()) {
                return Err(ConfigError::NonPositive { name: "waist_um", value: w });
            }
        }
        Ok(())
    }

    pub fn quadrature(&self) -> DiscQuadrature {
        DiscQuadrature {
            rings: self.quadrature_rings,
            spokes: self.quadrature_spokes,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.sim.validate()?;
        self.mot.validate()?;
        self.grids.validate()?;
        if self.ensembles.scatter_windows == 0 || self.ensembles.transit_windows == 0 {
            return Err(ConfigError::Invalid("ensemble sizes must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml().unwrap();
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_toml().unwrap(), text);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("[sim.cavity]\nkapa_mhz = 3.0\n").is_err());
    }

    #[test]
    fn grid_includes_endpoint() {
        let g = linear_grid(-1.0, 1.0, 0.1).unwrap();
        assert_eq!(g.len(), 21);
        assert!((g[20] - 1.0).abs() < 1e-12);
        assert!(linear_grid(0.0, 1.0, 0.0).is_err());
    }
}
