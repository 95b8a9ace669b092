use serde::{Deserialize, Serialize};

use crate::atomic::{decay_branching, excited_projection, transition_weight, Polarization, Spin};

use super::{mode_index, CavityParams, LocalConditions};

/// Bad-cavity effective rates for an atom starting in one ground spin (1/s).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EmissionRates {
    pub rate_sigma_plus: f64,
    pub rate_sigma_minus: f64,
    pub spin_flip_rate: f64,
    pub free_space_rate: f64,
    /// Set when g exceeds κ and the elimination is not trustworthy.
    pub regime_warning: bool,
}

impl EmissionRates {
    pub fn cavity_rate(&self, mode: Polarization) -> f64 {
        match mode {
            Polarization::SigmaPlus => self.rate_sigma_plus,
            Polarization::SigmaMinus => self.rate_sigma_minus,
            Polarization::Pi => 0.0,
        }
    }

    pub fn total_scattering(&self) -> f64 {
        self.rate_sigma_plus + self.rate_sigma_minus + self.free_space_rate
    }
}

/// Effective rates with the cavity field adiabatically eliminated.
///
/// Every excited sublevel e reachable from `spin` by a drive component is
/// treated as an independent two-level system with Rabi frequency
/// `Ω_q√w`, total population decay `Γ_e = 2γ + Σ_b 2g²w_b κ/(κ²+Δ_c²)`
/// (the sum running over its σ± branches) and detuning `Δ_e - δ_e` from the
/// drive, including the dispersive pull of the cavity. Saturation of one
/// excited sublevel depletes the ground state for the others. Photon rates
/// into a mode are the excited populations times the cavity-enhanced decay
/// into it; the spin-flip rate collects every branch, free-space or cavity,
/// that ends in the other ground spin.
pub fn adiabatic_rates(spin: Spin, conditions: &LocalConditions, cavity: &CavityParams) -> EmissionRates {
    let g2 = conditions.coupling * conditions.coupling;
    let dc = conditions.cavity_detuning;
    let lorentz = cavity.kappa * cavity.kappa + dc * dc;
    let purcell = 2.0 * g2 * cavity.kappa / lorentz;
    let pull = -g2 * dc / lorentz;
    let free = 2.0 * cavity.gamma;

    struct Level {
        x: f64,
        to_mode: [f64; 2],
        flip: f64,
    }
    let mut levels: Vec<Level> = Vec::with_capacity(3);
    for pol in Polarization::ALL {
        let omega2 = conditions.drive_component(pol);
        if omega2 <= 0.0 {
            continue;
        }
        let w = transition_weight(spin.m(), pol).unwrap();
        let m_e = excited_projection(spin.m(), pol).unwrap();
        let mut to_mode = [0.0; 2];
        let mut flip = 0.0;
        let mut cavity_total = 0.0;
        let mut pull_total = 0.0;
        for b in decay_branching(m_e).unwrap() {
            let mut rate = free * b.fraction;
            if let Some(mode) = mode_index(b.polarization) {
                let enhanced = purcell * b.fraction;
                to_mode[mode] += enhanced;
                cavity_total += enhanced;
                pull_total += pull * b.fraction;
                rate += enhanced;
            }
            if b.ground_m != spin.m() {
                flip += rate;
            }
        }
        let gamma_e = free + cavity_total;
        let detuning = conditions.excitation_detuning - conditions.shifts.for_sublevel(m_e) - pull_total;
        let pump = omega2 * w * gamma_e / (4.0 * detuning * detuning + gamma_e * gamma_e);
        levels.push(Level {
            x: pump / (pump + gamma_e),
            to_mode,
            flip,
        });
    }
    let ground = 1.0 / (1.0 + levels.iter().map(|l| l.x).sum::<f64>());
    let mut out = EmissionRates {
        regime_warning: conditions.coupling > cavity.kappa,
        ..EmissionRates::default()
    };
    for l in &levels {
        let pe = l.x * ground;
        out.rate_sigma_plus += pe * l.to_mode[0];
        out.rate_sigma_minus += pe * l.to_mode[1];
        out.spin_flip_rate += pe * l.flip;
        out.free_space_rate += pe * free;
    }
    out
}

/// Long-run probability of ↑ for a spin that flips ↑→↓ at `up_to_down` and
/// ↓→↑ at `down_to_up`; `None` when neither process acts.
pub fn stationary_up_fraction(up_to_down: f64, down_to_up: f64) -> Option<f64> {
    let total = up_to_down + down_to_up;
    (total > 0.0).then(|| down_to_up / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lightshift::ShiftResult;
    use crate::units::mhz_to_angular;

    fn cond(detuning_mhz: f64, shifts: ShiftResult) -> LocalConditions {
        let omega2 = mhz_to_angular(0.3).powi(2);
        LocalConditions {
            coupling: mhz_to_angular(2.0),
            drive_rabi_squared: [omega2 / 2.0, 0.0, omega2 / 2.0],
            excitation_detuning: mhz_to_angular(detuning_mhz),
            cavity_detuning: 0.0,
            shifts,
        }
    }

    #[test]
    fn shifted_resonance_favours_cyclic_mode() {
        let shifts = ShiftResult::new(mhz_to_angular(6.8), mhz_to_angular(-12.8));
        let cav = CavityParams::default();
        let up = adiabatic_rates(Spin::Up, &cond(6.8, shifts), &cav);
        assert!(up.rate_sigma_plus > 50.0 * up.rate_sigma_minus);
        let down = adiabatic_rates(Spin::Down, &cond(6.8, shifts), &cav);
        assert!(down.rate_sigma_minus > 50.0 * down.rate_sigma_plus);
    }

    #[test]
    fn far_from_mode_no_cavity_emission() {
        let cav = CavityParams::default();
        let mut c = cond(0.0, ShiftResult::ZERO);
        c.coupling = cav.coupling([5.0 * cav.mode_waist, 0.0, 0.0]);
        let r = adiabatic_rates(Spin::Up, &c, &cav);
        assert!(r.rate_sigma_plus < 1e-12 * r.free_space_rate);
        assert!(r.rate_sigma_minus < 1e-12 * r.free_space_rate);
    }

    #[test]
    fn regime_flag() {
        let cav = CavityParams::default();
        let mut c = cond(0.0, ShiftResult::ZERO);
        assert!(!adiabatic_rates(Spin::Up, &c, &cav).regime_warning);
        c.coupling = 1.5 * cav.kappa;
        assert!(adiabatic_rates(Spin::Up, &c, &cav).regime_warning);
    }

    #[test]
    fn stationary_fraction() {
        assert_eq!(stationary_up_fraction(0.0, 0.0), None);
        assert_eq!(stationary_up_fraction(1.0, 3.0), Some(0.75));
    }
}
