//! ¹⁷¹Yb level structure used by the readout model.
//!
//! The qubit lives in ¹S₀ (I = 1/2, F = 1/2): `|↑⟩ = m_F +1/2`, `|↓⟩ = m_F -1/2`.
//! Both are coupled on the 556 nm intercombination line to ³P₁(F′ = 3/2).
//! The ³P₁ sublevels are light-shifted through ³D₁(F′ = 1/2, 3/2) at 1539 nm.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::half::Half;
use crate::units::mhz_to_angular;
use crate::wigner::clebsch_gordan_squared;

#[derive(Debug, Error, PartialEq)]
pub enum AtomicError {
    #[error("invalid ground-state projection m = {0} (expected ±1/2)")]
    InvalidGroundProjection(Half),
    #[error("invalid ³P₁(F′=3/2) projection m′ = {0}")]
    InvalidExcitedProjection(Half),
    #[error("sublevel {term:?} F = {f}, m = {m} is not part of the level scheme")]
    InvalidSublevel { term: Term, f: Half, m: Half },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    S0,
    P1,
    D1,
}

impl Term {
    /// Hyperfine manifolds of this term retained by the model.
    pub fn allowed_f(self) -> &'static [Half] {
        match self {
            Term::S0 => &[Half::HALF],
            Term::P1 => &[Half::THREE_HALVES],
            Term::D1 => &[Half::HALF, Half::THREE_HALVES],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sublevel {
    pub term: Term,
    pub f: Half,
    pub m: Half,
}

impl Sublevel {
    pub fn new(term: Term, f: Half, m: Half) -> Result<Self, AtomicError> {
        let ok = term.allowed_f().contains(&f) && m.abs() <= f && !m.is_integer();
        if ok {
            Ok(Sublevel { term, f, m })
        } else {
            Err(AtomicError::InvalidSublevel { term, f, m })
        }
    }
}

/// Photon polarization, labelled by the change `q = m_excited - m_ground`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    SigmaPlus,
    Pi,
    SigmaMinus,
}

impl Polarization {
    pub const ALL: [Polarization; 3] = [
        Polarization::SigmaPlus,
        Polarization::Pi,
        Polarization::SigmaMinus,
    ];

    pub fn q(self) -> i32 {
        match self {
            Polarization::SigmaPlus => 1,
            Polarization::Pi => 0,
            Polarization::SigmaMinus => -1,
        }
    }

    pub fn from_q(q: i32) -> Option<Self> {
        match q {
            1 => Some(Polarization::SigmaPlus),
            0 => Some(Polarization::Pi),
            -1 => Some(Polarization::SigmaMinus),
            _ => None,
        }
    }

    /// Helicity reversal `q → -q`.
    pub fn mirror(self) -> Self {
        Polarization::from_q(-self.q()).unwrap()
    }
}

/// Nuclear spin qubit state in ¹S₀.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn m(self) -> Half {
        match self {
            Spin::Up => Half::HALF,
            Spin::Down => Half::MINUS_HALF,
        }
    }

    pub fn from_m(m: Half) -> Option<Self> {
        match m.twice() {
            1 => Some(Spin::Up),
            -1 => Some(Spin::Down),
            _ => None,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    /// Cavity polarization that the spin scatters on its cyclic transition.
    pub fn desired_polarization(self) -> Polarization {
        match self {
            Spin::Up => Polarization::SigmaPlus,
            Spin::Down => Polarization::SigmaMinus,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Spin::Up => "up",
            Spin::Down => "down",
        }
    }
}

const GROUND_F: Half = Half::HALF;
const EXCITED_F: Half = Half::THREE_HALVES;

fn check_ground(m: Half) -> Result<(), AtomicError> {
    if m == Half::HALF || m == Half::MINUS_HALF {
        Ok(())
    } else {
        Err(AtomicError::InvalidGroundProjection(m))
    }
}

fn check_excited(m: Half) -> Result<(), AtomicError> {
    if !m.is_integer() && m.abs() <= EXCITED_F {
        Ok(())
    } else {
        Err(AtomicError::InvalidExcitedProjection(m))
    }
}

fn coupling_squared(ground_m: Half, q: i32, excited_m: Half) -> f64 {
    clebsch_gordan_squared(GROUND_F, ground_m, Half::ONE, Half::from_int(q), EXCITED_F, excited_m)
}

/// Relative strength of the ¹S₀(F=1/2, m) → ³P₁(F′=3/2, m+q) transition.
///
/// Normalized so the cyclic (stretched) transitions have weight 1; the
/// absolute dipole is absorbed into `g₀` and `γ`.
pub fn transition_weight(ground_m: Half, polarization: Polarization) -> Result<f64, AtomicError> {
    check_ground(ground_m)?;
    let q = polarization.q();
    Ok(coupling_squared(ground_m, q, ground_m + Half::from_int(q)))
}

/// Excited sublevel reached from `ground_m` by absorbing `polarization`.
pub fn excited_projection(ground_m: Half, polarization: Polarization) -> Result<Half, AtomicError> {
    check_ground(ground_m)?;
    Ok(ground_m + Half::from_int(polarization.q()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayBranch {
    pub ground_m: Half,
    pub polarization: Polarization,
    pub fraction: f64,
}

/// Spontaneous decay channels of ³P₁(F′=3/2, m′) back to ¹S₀.
pub fn decay_branching(excited_m: Half) -> Result<Vec<DecayBranch>, AtomicError> {
    check_excited(excited_m)?;
    let mut out = Vec::with_capacity(2);
    for ground_m in [Half::HALF, Half::MINUS_HALF] {
        let q = (excited_m - ground_m).twice() / 2;
        if let Some(polarization) = Polarization::from_q(q) {
            let fraction = coupling_squared(ground_m, q, excited_m);
            if fraction > 0.0 {
                out.push(DecayBranch {
                    ground_m,
                    polarization,
                    fraction,
                });
            }
        }
    }
    Ok(out)
}

/// Level-structure parameters in laboratory units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LevelConfig {
    /// Half natural linewidth of ¹S₀–³P₁ (γ/2π), MHz.
    pub gamma_p1_mhz: f64,
    /// Wavelength of ¹S₀–³P₁, nm.
    pub p1_wavelength_nm: f64,
    /// Linewidth (decay rate /2π) of the ³P₁–³D₁ line, kHz.
    pub d1_linewidth_khz: f64,
    /// Wavelength of ³P₁–³D₁, nm.
    pub d1_wavelength_nm: f64,
    /// Branching ratio ³D₁ → ³P₀.
    pub branching_d1_to_p0: f64,
    /// Energy of ³D₁(F′=1/2) minus ³D₁(F′=3/2), MHz. Calibrated so the
    /// hyperfine-weight relation maps a +8.5 MHz m′=±3/2 shift onto -16 MHz
    /// for m′=±1/2 at -300 MHz detuning from F′=1/2.
    pub d1_hyperfine_splitting_mhz: f64,
    /// Residual geometric factor on the ³P₁–³D₁ Rabi frequency squared.
    /// Calibrated so m′=±3/2 shifts by +6.8 MHz at 9 mW, w = 50 µm.
    pub p1_d1_geometric_factor: f64,
    /// Detunings closer than this multiple of the ³D₁ linewidth are rejected.
    pub resonance_floor_factor: f64,
}

/// Frozen calibration of the ³D₁ hyperfine splitting, MHz.
pub const DEFAULT_D1_HYPERFINE_SPLITTING_MHZ: f64 = 2_991.176_470_588_235;
/// Frozen calibration of the ³P₁–³D₁ geometric factor.
pub const DEFAULT_P1_D1_GEOMETRIC_FACTOR: f64 = 2.863_108_624_528_968;

impl Default for LevelConfig {
    fn default() -> Self {
        LevelConfig {
            gamma_p1_mhz: 0.091,
            p1_wavelength_nm: 556.0,
            d1_linewidth_khz: 16.0,
            d1_wavelength_nm: 1539.0,
            branching_d1_to_p0: 0.64,
            d1_hyperfine_splitting_mhz: DEFAULT_D1_HYPERFINE_SPLITTING_MHZ,
            p1_d1_geometric_factor: DEFAULT_P1_D1_GEOMETRIC_FACTOR,
            resonance_floor_factor: 10.0,
        }
    }
}

/// Validated level structure; all rates in rad/s, wavelengths in m.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelScheme {
    pub sublevels: Vec<Sublevel>,
    pub gamma_p1: f64,
    pub p1_wavelength: f64,
    pub gamma_d1_line: f64,
    pub d1_wavelength: f64,
    pub branching_d1_to_p0: f64,
    pub d1_hyperfine_splitting: f64,
    pub p1_d1_geometric_factor: f64,
    pub resonance_floor_factor: f64,
}

impl LevelScheme {
    /// Smallest detuning (rad/s) accepted by the perturbative light-shift formula.
    pub fn resonance_floor(&self) -> f64 {
        self.resonance_floor_factor * self.gamma_d1_line
    }

    pub fn ground(spin: Spin) -> Sublevel {
        Sublevel {
            term: Term::S0,
            f: GROUND_F,
            m: spin.m(),
        }
    }
}

pub fn build_level_scheme(config: &LevelConfig) -> Result<LevelScheme, crate::ConfigError> {
    use crate::ConfigError;
    let positive = [
        ("gamma_p1_mhz", config.gamma_p1_mhz),
        ("p1_wavelength_nm", config.p1_wavelength_nm),
        ("d1_linewidth_khz", config.d1_linewidth_khz),
        ("d1_wavelength_nm", config.d1_wavelength_nm),
        ("p1_d1_geometric_factor", config.p1_d1_geometric_factor),
        ("d1_hyperfine_splitting_mhz", config.d1_hyperfine_splitting_mhz),
        ("resonance_floor_factor", config.resonance_floor_factor),
    ];
    for (name, v) in positive {
        if !(v.is_finite() && v > 0.0) {
            return Err(ConfigError::NonPositive { name, value: v });
        }
    }
    if !(0.0..=1.0).contains(&config.branching_d1_to_p0) {
        return Err(ConfigError::OutOfRange {
            name: "branching_d1_to_p0",
            value: config.branching_d1_to_p0,
            range: "[0, 1]",
        });
    }

    let mut sublevels = Vec::new();
    for term in [Term::S0, Term::P1, Term::D1] {
        for &f in term.allowed_f() {
            for m in f.projections() {
                sublevels.push(Sublevel { term, f, m });
            }
        }
    }

    Ok(LevelScheme {
        sublevels,
        gamma_p1: mhz_to_angular(config.gamma_p1_mhz),
        p1_wavelength: config.p1_wavelength_nm * 1e-9,
        gamma_d1_line: mhz_to_angular(config.d1_linewidth_khz * 1e-3),
        d1_wavelength: config.d1_wavelength_nm * 1e-9,
        branching_d1_to_p0: config.branching_d1_to_p0,
        d1_hyperfine_splitting: mhz_to_angular(config.d1_hyperfine_splitting_mhz),
        p1_d1_geometric_factor: config.p1_d1_geometric_factor,
        resonance_floor_factor: config.resonance_floor_factor,
    })
}
