//! Desk-scale simulator of nuclear-spin-selective readout of a single ¹⁷¹Yb
//! atom in a two-mode (σ⁺/σ⁻) optical cavity.
//!
//! The crate is organised bottom-up:
//!
//! * [`atomic`]: level structure, Clebsch-Gordan transition weights and decay
//!   branching of the ¹S₀(F=1/2) ↔ ³P₁(F′=3/2) line.
//! * [`lightshift`]: AC Stark shifts of the ³P₁ sublevels from a π-polarized
//!   beam near the ³P₁–³D₁ transition, including the Gaussian beam profile.
//! * [`dynamics`]: the full two-mode Lindblad model (Hamiltonian, generator,
//!   steady state, time evolution) and the bad-cavity effective rates.
//! * [`transit`]: Monte Carlo free-fall transits and photon-count records.
//! * [`observables`]: spectra, SNR, correlations, dark-count correction and the
//!   MOT depletion profile.
//!
//! Frequencies in configuration structs are ordinary frequencies in MHz (the
//! familiar `x/2π` convention); every accessor that feeds the physics returns
//! angular frequencies in rad/s. Lengths are SI unless a field says otherwise.

pub mod atomic;
pub mod config;
pub mod dynamics;
pub mod half;
pub mod lightshift;
pub mod model;
pub mod observables;
pub mod transit;
pub mod units;
pub mod wigner;

pub use atomic::{LevelConfig, LevelScheme, Polarization, Spin, Sublevel, Term};
pub use config::{ConfigError, SimConfig};
pub use half::Half;
pub use lightshift::{BeamParams, ShiftResult};
