use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atomic::Spin;
use crate::model::ReadoutModel;

use super::{Simulation, Trajectory};

/// Mean photon numbers (σ⁺, σ⁻) per atom.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpectedCounts {
    pub emitted: [f64; 2],
    pub detected: [f64; 2],
    /// Probability that the spin ends opposite to where it started.
    pub flip_probability: f64,
}

impl ExpectedCounts {
    pub fn total_detected(&self) -> f64 {
        self.detected[0] + self.detected[1]
    }

    fn accumulate(&mut self, other: &ExpectedCounts, weight: f64) {
        for m in 0..2 {
            self.emitted[m] += weight * other.emitted[m];
            self.detected[m] += weight * other.detected[m];
        }
        self.flip_probability += weight * other.flip_probability;
    }
}

/// Mean counts along one path, treating the spin as a two-state Markov
/// chain whose populations are propagated exactly across each step.
pub fn expected_transit_counts(trajectory: &Trajectory, initial_spin: Spin, model: &ReadoutModel) -> ExpectedCounts {
    let dt = trajectory.time_step;
    // probability of the initial spin
    let mut p_same = 1.0;
    let mut emitted = [0.0; 2];
    for k in 0..trajectory.n_steps {
        let pos = trajectory.step_position(k);
        let same = model.rates_at(initial_spin, pos);
        let other = model.rates_at(initial_spin.flipped(), pos);
        let a = same.spin_flip_rate;
        let b = other.spin_flip_rate;
        let s = a + b;
        // ∫ p_same over the step
        let (occupancy, next) = if s > 0.0 {
            let p_inf = b / s;
            let decay = (-s * dt).exp();
            let occ = p_inf * dt + (p_same - p_inf) * (-(-s * dt).exp_m1()) / s;
            (occ, p_inf + (p_same - p_inf) * decay)
        } else {
            (p_same * dt, p_same)
        };
        let occupancy_other = dt - occupancy;
        emitted[0] += occupancy * same.rate_sigma_plus + occupancy_other * other.rate_sigma_plus;
        emitted[1] += occupancy * same.rate_sigma_minus + occupancy_other * other.rate_sigma_minus;
        p_same = next;
    }
    let eta = model.cavity.detection_efficiency;
    ExpectedCounts {
        emitted,
        detected: [eta * emitted[0], eta * emitted[1]],
        flip_probability: 1.0 - p_same,
    }
}

/// Equal-area midpoint rule on a disc: `rings` annuli of equal area, each
/// sampled at `spokes` evenly spaced angles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscQuadrature {
    pub rings: usize,
    pub spokes: usize,
}

impl Default for DiscQuadrature {
    fn default() -> Self {
        DiscQuadrature { rings: 16, spokes: 16 }
    }
}

impl DiscQuadrature {
    /// Nodes (x, z); all weights are equal.
    pub fn nodes(&self, radius: f64) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.rings * self.spokes);
        for i in 0..self.rings {
            let r = radius * ((i as f64 + 0.5) / self.rings as f64).sqrt();
            for j in 0..self.spokes {
                let th = 2.0 * PI * (j as f64 + 0.5) / self.spokes as f64;
                out.push([r * th.cos(), r * th.sin()]);
            }
        }
        out
    }
}

/// Per-atom mean counts averaged over impact points uniform on the disc.
pub fn expected_counts(sim: &Simulation, initial_spin: Spin, quadrature: &DiscQuadrature) -> ExpectedCounts {
    let nodes = quadrature.nodes(sim.geometry.impact_radius);
    let per_node: Vec<ExpectedCounts> = nodes
        .par_iter()
        .map(|&p| expected_transit_counts(&Trajectory::through(p, &sim.geometry), initial_spin, &sim.model))
        .collect();
    let w = 1.0 / per_node.len() as f64;
    let mut total = ExpectedCounts::default();
    for c in &per_node {
        total.accumulate(c, w);
    }
    total
}

/// Largest relative change of the expected detected counts (either mode)
/// when the time step is halved.
pub fn time_step_convergence(sim: &Simulation, initial_spin: Spin, quadrature: &DiscQuadrature) -> f64 {
    let coarse = expected_counts(sim, initial_spin, quadrature);
    let mut fine_sim = sim.clone();
    fine_sim.geometry = sim.geometry.with_time_step(sim.geometry.time_step / 2.0);
    let fine = expected_counts(&fine_sim, initial_spin, quadrature);
    (0..2)
        .map(|m| {
            let scale = fine.detected[m].abs().max(1e-300);
            (coarse.detected[m] - fine.detected[m]).abs() / scale
        })
        .fold(0.0, f64::max)
}
