//! Free-fall transits of single atoms through the cavity mode and the photon
//! counts they leave on the two detectors.

mod expected;
mod io;

pub use expected::{expected_counts, expected_transit_counts, time_step_convergence, DiscQuadrature, ExpectedCounts};
pub use io::{read_records, read_rows, write_records, write_rows, Format, IoError, Record, FORMAT_VERSION};

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Exp, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atomic::Spin;
use crate::config::{ConfigError, SimConfig};
use crate::dynamics::EmissionRates;
use crate::model::ReadoutModel;
use crate::units::STANDARD_GRAVITY;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitGeometry {
    pub drop_height: f64,
    pub mode_waist: f64,
    /// Radius of the disc over which impact points are drawn, m.
    pub impact_radius: f64,
    /// Path runs from `+half_span` to `-half_span` in y, m.
    pub half_span: f64,
    pub time_step: f64,
}

impl TransitGeometry {
    pub fn from_config(config: &SimConfig) -> Result<Self, ConfigError> {
        config.geometry.validate()?;
        config.cavity.validate()?;
        let g = &config.geometry;
        let mode_waist = config.cavity.mode_waist_um * 1e-6;
        Ok(TransitGeometry {
            drop_height: g.drop_height_mm * 1e-3,
            mode_waist,
            impact_radius: g.impact_radius_waists * mode_waist,
            half_span: g.half_span_um * 1e-6,
            time_step: g.time_step_us * 1e-6,
        })
    }

    /// Free-fall speed at the cavity, `√(2 g h)`.
    pub fn velocity(&self) -> f64 {
        (2.0 * STANDARD_GRAVITY * self.drop_height).sqrt()
    }

    /// Time to cross one mode diameter.
    pub fn mean_transit_time(&self) -> f64 {
        2.0 * self.mode_waist / self.velocity()
    }

    pub fn n_steps(&self) -> usize {
        let total = 2.0 * self.half_span / self.velocity();
        ((total / self.time_step).round() as usize).max(1)
    }

    pub fn with_time_step(&self, time_step: f64) -> Self {
        TransitGeometry {
            time_step,
            ..self.clone()
        }
    }
}

/// Straight vertical path at constant speed. The cavity axis is `z`; the
/// atom falls along `-y` and crosses the axis plane at `t = duration/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Horizontal offsets (x, z) of the path.
    pub impact: [f64; 2],
    pub velocity: f64,
    pub half_span: f64,
    pub time_step: f64,
    pub n_steps: usize,
}

impl Trajectory {
    pub fn through(impact: [f64; 2], geometry: &TransitGeometry) -> Self {
        let n_steps = geometry.n_steps();
        let velocity = geometry.velocity();
        Trajectory {
            impact,
            velocity,
            half_span: geometry.half_span,
            // adjust so the steps tile the path exactly
            time_step: 2.0 * geometry.half_span / velocity / n_steps as f64,
            n_steps,
        }
    }

    pub fn duration(&self) -> f64 {
        self.time_step * self.n_steps as f64
    }

    pub fn position(&self, t: f64) -> [f64; 3] {
        [self.impact[0], self.half_span - self.velocity * t, self.impact[1]]
    }

    /// Midpoint of integration step `k`.
    pub fn step_position(&self, k: usize) -> [f64; 3] {
        self.position((k as f64 + 0.5) * self.time_step)
    }

    /// Largest coupling along the path (reached where it crosses y = 0).
    pub fn peak_coupling(&self, model: &ReadoutModel) -> f64 {
        model.cavity.coupling([self.impact[0], 0.0, self.impact[1]])
    }

    /// Rates for both initial spins at every step midpoint.
    pub fn rate_profile(&self, model: &ReadoutModel) -> Vec<[EmissionRates; 2]> {
        (0..self.n_steps)
            .map(|k| {
                let p = self.step_position(k);
                [model.rates_at(Spin::Up, p), model.rates_at(Spin::Down, p)]
            })
            .collect()
    }
}

/// Draws an impact point uniformly over the disc of `geometry.impact_radius`.
pub fn sample_trajectory<R: Rng + ?Sized>(rng: &mut R, geometry: &TransitGeometry) -> Trajectory {
    let r = geometry.impact_radius * rng.gen::<f64>().sqrt();
    let theta = 2.0 * PI * rng.gen::<f64>();
    Trajectory::through([r * theta.cos(), r * theta.sin()], geometry)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitRecord {
    pub initial_spin: Spin,
    pub final_spin: Spin,
    pub counts_sigma_plus: u64,
    pub counts_sigma_minus: u64,
    /// Photons leaving the cavity before detection losses.
    pub emitted_sigma_plus: u64,
    pub emitted_sigma_minus: u64,
    pub spin_flips: u32,
    pub transit_duration: f64,
    /// Peak coupling along the path, rad/s.
    pub peak_coupling: f64,
    pub impact_x: f64,
    pub impact_z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub initial_spin: Spin,
    pub window: f64,
    pub atom_count: u64,
    pub counts_sigma_plus: u64,
    pub counts_sigma_minus: u64,
    pub dark_sigma_plus: u64,
    pub dark_sigma_minus: u64,
}

/// Model, geometry and window settings needed by every stochastic routine.
#[derive(Clone, Debug, PartialEq)]
pub struct Simulation {
    pub model: ReadoutModel,
    pub geometry: TransitGeometry,
    /// Measurement window, s.
    pub window: f64,
    /// Mean atom arrivals per second.
    pub atom_rate: f64,
}

impl Simulation {
    pub fn new(config: &SimConfig) -> Result<Self, ConfigError> {
        Ok(Simulation {
            model: ReadoutModel::new(config)?,
            geometry: TransitGeometry::from_config(config)?,
            window: config.counting.window_ms * 1e-3,
            atom_rate: config.counting.atom_rate_per_ms * 1e3,
        })
    }

    pub fn with_model(&self, model: ReadoutModel) -> Self {
        Simulation {
            model,
            ..self.clone()
        }
    }
}

/// RNG for run `index` of an ensemble: ChaCha8 keyed by `master_seed`, with
/// the run index selecting the stream. Streams never overlap, so a run's
/// draws do not depend on how runs are scheduled.
pub fn child_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
}

fn thin<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("valid probability").sample(rng)
}

/// One atom crossing the cavity.
///
/// Rates are held constant over each time step. Within a step the spin flips
/// after an exponential waiting time; photon numbers over each constant-rate
/// segment are Poisson and the detected ones a binomial thinning by the
/// detection efficiency.
pub fn simulate_transit<R: Rng + ?Sized>(rng: &mut R, initial_spin: Spin, sim: &Simulation) -> TransitRecord {
    let trajectory = sample_trajectory(rng, &sim.geometry);
    run_trajectory(rng, initial_spin, &trajectory, sim)
}

/// [`simulate_transit`] along a given path.
pub fn run_trajectory<R: Rng + ?Sized>(
    rng: &mut R,
    initial_spin: Spin,
    trajectory: &Trajectory,
    sim: &Simulation,
) -> TransitRecord {
    let model = &sim.model;
    let eta = model.cavity.detection_efficiency;
    let mut spin = initial_spin;
    let mut emitted = [0u64; 2];
    let mut detected = [0u64; 2];
    let mut flips = 0u32;
    for k in 0..trajectory.n_steps {
        let p = trajectory.step_position(k);
        let mut rates = model.rates_at(spin, p);
        let mut left = trajectory.time_step;
        while left > 0.0 {
            let seg = if rates.spin_flip_rate > 0.0 {
                let wait: f64 = Exp::new(rates.spin_flip_rate).unwrap().sample(rng);
                wait.min(left)
            } else {
                left
            };
            let counts = [
                poisson(rng, rates.rate_sigma_plus * seg),
                poisson(rng, rates.rate_sigma_minus * seg),
            ];
            for m in 0..2 {
                emitted[m] += counts[m];
                detected[m] += thin(rng, counts[m], eta);
            }
            left -= seg;
            if left > 0.0 {
                spin = spin.flipped();
                flips += 1;
                rates = model.rates_at(spin, p);
            }
        }
    }
    TransitRecord {
        initial_spin,
        final_spin: spin,
        counts_sigma_plus: detected[0],
        counts_sigma_minus: detected[1],
        emitted_sigma_plus: emitted[0],
        emitted_sigma_minus: emitted[1],
        spin_flips: flips,
        transit_duration: trajectory.duration(),
        peak_coupling: trajectory.peak_coupling(model),
        impact_x: trajectory.impact[0],
        impact_z: trajectory.impact[1],
    }
}

/// One measurement window: Poisson atom arrivals at `atom_rate` (1/s), each
/// an independent transit, plus Poisson dark counts on both detectors.
pub fn simulate_window<R: Rng + ?Sized>(
    rng: &mut R,
    initial_spin: Spin,
    atom_rate: f64,
    window: f64,
    sim: &Simulation,
) -> CountRecord {
    assert!(atom_rate >= 0.0 && window > 0.0);
    let atoms = poisson(rng, atom_rate * window);
    let mut signal = [0u64; 2];
    for _ in 0..atoms {
        let t = simulate_transit(rng, initial_spin, sim);
        signal[0] += t.counts_sigma_plus;
        signal[1] += t.counts_sigma_minus;
    }
    let dark = [
        poisson(rng, sim.model.cavity.dark_rates[0] * window),
        poisson(rng, sim.model.cavity.dark_rates[1] * window),
    ];
    CountRecord {
        initial_spin,
        window,
        atom_count: atoms,
        counts_sigma_plus: signal[0] + dark[0],
        counts_sigma_minus: signal[1] + dark[1],
        dark_sigma_plus: dark[0],
        dark_sigma_minus: dark[1],
    }
}

/// `n_runs` measurement windows, run `i` drawing from `child_rng(master_seed, i)`.
pub fn run_ensemble(n_runs: usize, master_seed: u64, initial_spin: Spin, sim: &Simulation) -> Vec<CountRecord> {
    (0..n_runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = child_rng(master_seed, i as u64);
            simulate_window(&mut rng, initial_spin, sim.atom_rate, sim.window, sim)
        })
        .collect()
}

/// `n_runs` single-atom transits with the same seeding rule as [`run_ensemble`].
pub fn run_transit_ensemble(
    n_runs: usize,
    master_seed: u64,
    initial_spin: Spin,
    sim: &Simulation,
) -> Vec<TransitRecord> {
    (0..n_runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = child_rng(master_seed, i as u64);
            simulate_transit(&mut rng, initial_spin, sim)
        })
        .collect()
}
