//! Two-mode atom-cavity master equation and its bad-cavity reduction.

mod adiabatic;
mod basis;
mod lindblad;
mod solver;
mod sparse;
mod state;

pub use adiabatic::{adiabatic_rates, stationary_up_fraction, EmissionRates};
pub use basis::{AtomLevel, Basis};
pub use lindblad::{build_hamiltonian, build_lindblad, Generator, Operator};
pub use solver::{evolve, fock_truncation_error, steady_state, steady_state_from, EvolveOptions};
pub use sparse::CsrMatrix;
pub use state::SystemState;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atomic::Polarization;
use crate::config::CavityConfig;
use crate::lightshift::{LightShiftError, ShiftResult};
use crate::units::mhz_to_angular;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("operator dimension {found} does not match basis dimension {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("Fock cutoff must be at least 1")]
    FockCutoff,
    #[error("steady state did not converge: relative residual {residual:.3e}")]
    NoConvergence { residual: f64 },
    #[error("integrator step size underflow at t = {t:.3e} s (h = {step:.3e} s)")]
    StepUnderflow { t: f64, step: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
    #[error(transparent)]
    LightShift(#[from] LightShiftError),
}

/// Cavity and detection parameters in SI units (rates in rad/s or 1/s).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    pub g0: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub mode_waist: f64,
    pub axial_factor: f64,
    /// Cavity resonance minus drive frequency, rad/s.
    pub cavity_detuning: f64,
    pub detection_efficiency: f64,
    /// Dark-count rates (σ⁺, σ⁻ detector), counts/s.
    pub dark_rates: [f64; 2],
}

impl CavityParams {
    pub fn from_config(config: &CavityConfig) -> Result<Self, crate::ConfigError> {
        config.validate()?;
        Ok(CavityParams {
            g0: mhz_to_angular(config.g0_mhz),
            kappa: mhz_to_angular(config.kappa_mhz),
            gamma: mhz_to_angular(config.gamma_mhz),
            mode_waist: config.mode_waist_um * 1e-6,
            axial_factor: config.axial_coupling_factor,
            cavity_detuning: mhz_to_angular(config.cavity_drive_detuning_mhz),
            detection_efficiency: config.detection_efficiency,
            dark_rates: [
                config.dark_rate_sigma_plus_per_ms * 1e3,
                config.dark_rate_sigma_minus_per_ms * 1e3,
            ],
        })
    }

    /// Coupling `g₀·a·exp(-(x²+y²)/w²)` for the cavity axis along `z`, where
    /// `a` is the axial standing-wave factor.
    pub fn coupling(&self, position: [f64; 3]) -> f64 {
        let r2 = position[0] * position[0] + position[1] * position[1];
        self.g0 * self.axial_factor * (-r2 / (self.mode_waist * self.mode_waist)).exp()
    }

    pub fn cooperativity(&self) -> f64 {
        self.g0 * self.g0 / (self.kappa * self.gamma)
    }

    pub fn dark_rate(&self, mode: Polarization) -> f64 {
        match mode {
            Polarization::SigmaPlus => self.dark_rates[0],
            Polarization::SigmaMinus => self.dark_rates[1],
            Polarization::Pi => 0.0,
        }
    }
}

impl Default for CavityParams {
    fn default() -> Self {
        CavityParams::from_config(&CavityConfig::default()).unwrap()
    }
}

/// Everything the atom sees at one point of its path, in rad/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalConditions {
    /// Atom-cavity coupling g (before Clebsch-Gordan weights).
    pub coupling: f64,
    /// Squared drive Rabi frequency carried by each polarization component
    /// (σ⁺, π, σ⁻), before Clebsch-Gordan weights.
    pub drive_rabi_squared: [f64; 3],
    /// Drive frequency minus the unshifted ¹S₀–³P₁ resonance.
    pub excitation_detuning: f64,
    /// Cavity resonance minus drive frequency.
    pub cavity_detuning: f64,
    pub shifts: ShiftResult,
}

impl LocalConditions {
    pub fn drive_component(&self, pol: Polarization) -> f64 {
        match pol {
            Polarization::SigmaPlus => self.drive_rabi_squared[0],
            Polarization::Pi => self.drive_rabi_squared[1],
            Polarization::SigmaMinus => self.drive_rabi_squared[2],
        }
    }

    /// Mirror image under m → -m: σ⁺ and σ⁻ drive components swap.
    pub fn mirrored(&self) -> Self {
        let [p, z, m] = self.drive_rabi_squared;
        LocalConditions {
            drive_rabi_squared: [m, z, p],
            ..*self
        }
    }
}

/// Index of the cavity mode that carries photons of `pol`, if any.
pub(crate) fn mode_index(pol: Polarization) -> Option<usize> {
    match pol {
        Polarization::SigmaPlus => Some(0),
        Polarization::SigmaMinus => Some(1),
        Polarization::Pi => None,
    }
}
