use std::collections::VecDeque;

use ndarray::{Array1, Array2};
use ndarray_linalg::{FactorizeInto, Solve};
use num_complex::Complex64;

use super::lindblad::{build_hamiltonian, build_lindblad, Generator};
use super::state::SystemState;
use super::{Basis, CavityParams, DynamicsError, LocalConditions};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative residual `‖Lρ‖∞ / (‖L‖∞ ‖ρ‖∞)` accepted for a steady state.
pub const STEADY_STATE_TOLERANCE: f64 = 1e-9;

/// Stationary state reached from an equal mixture of the two ground spins.
pub fn steady_state(generator: &Generator) -> Result<SystemState, DynamicsError> {
    let start = SystemState::ground_mixture(generator.basis, 0.5);
    steady_state_from(generator, &start)
}

/// Stationary state `lim_{t→∞} exp(Lt) ρ₀`.
///
/// Computed by resolvent (inverse) iteration `x ← ε(ε - L)⁻¹ x` with a small
/// shift ε, which damps every decaying mode by `ε/|λ|` per pass and leaves
/// the stationary projection of ρ₀ untouched. When L has several stationary
/// states (no drive: any ground-spin mixture) this keeps the conserved
/// ground populations of ρ₀. Only matrix elements reachable from the support
/// of ρ₀ are solved for.
pub fn steady_state_from(generator: &Generator, rho0: &SystemState) -> Result<SystemState, DynamicsError> {
    let d = generator.dim();
    if rho0.basis != generator.basis {
        return Err(DynamicsError::Dimension {
            expected: d,
            found: rho0.basis.dim(),
        });
    }
    let v0 = rho0.to_vec();
    let reach = reachable(generator, &v0);
    let n = reach.len();
    let mut local = vec![usize::MAX; d * d];
    for (k, &g) in reach.iter().enumerate() {
        local[g] = k;
    }

    let norm = generator.norm();
    if norm == 0.0 {
        return Ok(rho0.clone());
    }
    let eps = 1e-10 * norm;
    let mut a = Array2::<Complex64>::zeros((n, n));
    for (k, &g) in reach.iter().enumerate() {
        a[[k, k]] += Complex64::new(eps, 0.0);
        for (c, v) in generator.matrix.row(g) {
            // columns outside the reachable set only ever multiply zeros
            let lc = local[c];
            if lc != usize::MAX {
                a[[k, lc]] -= v;
            }
        }
    }
    let lu = a.factorize_into().map_err(|e| DynamicsError::Linalg(e.to_string()))?;
    let mut x: Array1<Complex64> = reach.iter().map(|&g| v0[g]).collect();
    let diag_local: Vec<usize> = (0..d).map(|i| local[i * d + i]).filter(|&k| k != usize::MAX).collect();

    let mut full = vec![ZERO; d * d];
    let mut residual = f64::INFINITY;
    for _ in 0..12 {
        let y = lu.solve(&x).map_err(|e| DynamicsError::Linalg(e.to_string()))?;
        let mut next = y.mapv(|v| v * eps);
        let tr: Complex64 = diag_local.iter().map(|&k| next[k]).sum();
        if tr.norm() == 0.0 || !tr.re.is_finite() {
            return Err(DynamicsError::NoConvergence { residual: f64::NAN });
        }
        next.mapv_inplace(|v| v / tr);
        let change = next
            .iter()
            .zip(x.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        x = next;
        for (k, &g) in reach.iter().enumerate() {
            full[g] = x[k];
        }
        residual = relative_residual(generator, &full, norm);
        if residual < 1e-3 * STEADY_STATE_TOLERANCE || change < 1e-15 {
            break;
        }
    }
    if !(residual <= STEADY_STATE_TOLERANCE) {
        return Err(DynamicsError::NoConvergence { residual });
    }
    SystemState::from_vec(generator.basis, full)
}

fn relative_residual(generator: &Generator, v: &[Complex64], norm: f64) -> f64 {
    let lv = generator.apply(v);
    let num = lv.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let den = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    num / (norm * den)
}

/// Vectorized indices reachable from the support of `v0` under repeated
/// application of the generator, sorted.
fn reachable(generator: &Generator, v0: &[Complex64]) -> Vec<usize> {
    let n = v0.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, c, _) in generator.matrix.triplets() {
        adj[c].push(r);
    }
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (i, v) in v0.iter().enumerate() {
        if *v != ZERO {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(c) = queue.pop_front() {
        for &r in &adj[c] {
            if !seen[r] {
                seen[r] = true;
                queue.push_back(r);
            }
        }
    }
    (0..n).filter(|&i| seen[i]).collect()
}

/// Controls for the adaptive Dormand-Prince integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Abort once the step falls below this fraction of the total time.
    pub min_step_fraction: f64,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            rtol: 1e-9,
            atol: 1e-12,
            min_step_fraction: 1e-14,
            max_steps: 5_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
// The generator is time independent, so the stage nodes c_i are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Propagates ρ₀ for time `t` (s) under `dρ/dt = Lρ`.
pub fn evolve(
    rho0: &SystemState,
    generator: &Generator,
    t: f64,
    options: &EvolveOptions,
) -> Result<SystemState, DynamicsError> {
    assert!(t >= 0.0 && t.is_finite(), "evolution time must be finite and nonnegative");
    if rho0.basis != generator.basis {
        return Err(DynamicsError::Dimension {
            expected: generator.dim(),
            found: rho0.basis.dim(),
        });
    }
    let norm = generator.norm();
    if t == 0.0 || norm == 0.0 {
        return Ok(rho0.clone());
    }
    let n = generator.dim() * generator.dim();
    let mut y = rho0.to_vec();
    let mut k: Vec<Vec<Complex64>> = vec![vec![ZERO; n]; 7];
    let mut stage = vec![ZERO; n];
    let mut y5 = vec![ZERO; n];
    let mut time = 0.0;
    let mut h = (0.5 / norm).min(t);
    let h_min = t * options.min_step_fraction;
    generator.apply_into(&y, &mut k[0]);
    let mut steps = 0usize;
    while time < t {
        if steps >= options.max_steps {
            return Err(DynamicsError::StepUnderflow { t: time, step: h });
        }
        steps += 1;
        h = h.min(t - time);
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += kj[i] * (a * h);
                    }
                }
                stage[i] = acc;
            }
            generator.apply_into(&stage, &mut k[s]);
            if s == 6 {
                y5.copy_from_slice(&stage);
            }
        }
        let mut err = 0.0f64;
        for i in 0..n {
            let mut e = ZERO;
            for s in 0..7 {
                let w = B5[s] - B4[s];
                if w != 0.0 {
                    e += k[s][i] * (w * h);
                }
            }
            let scale = options.atol + options.rtol * y[i].norm().max(y5[i].norm());
            err = err.max(e.norm() / scale);
        }
        if err <= 1.0 {
            time += h;
            std::mem::swap(&mut y, &mut y5);
            // first-same-as-last
            let last = k[6].clone();
            k[0] = last;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < h_min && time < t {
            return Err(DynamicsError::StepUnderflow { t: time, step: h });
        }
    }
    SystemState::from_vec(generator.basis, y)
}

/// Largest relative change of the mean photon numbers when the Fock cutoff
/// of `rho0`'s basis is doubled. The steady state at the original cutoff is
/// embedded in the larger space and relaxed there for `20/κ`, long enough for
/// the cavity field (which is what truncation affects) to settle.
pub fn fock_truncation_error(
    conditions: &LocalConditions,
    cavity: &CavityParams,
    rho0: &SystemState,
) -> Result<f64, DynamicsError> {
    let small = rho0.basis;
    let large = Basis::new(2 * small.n_max())?;
    let gen_small = build_lindblad(&build_hamiltonian(small, conditions), cavity)?;
    let ss = steady_state_from(&gen_small, rho0)?;
    let gen_large = build_lindblad(&build_hamiltonian(large, conditions), cavity)?;
    let relaxed = evolve(&ss.embed(large)?, &gen_large, 20.0 / cavity.kappa, &EvolveOptions::default())?;
    let mut worst = 0.0f64;
    for mode in 0..2 {
        let a = ss.mean_photons(mode);
        let b = relaxed.mean_photons(mode);
        if a.max(b) > 0.0 {
            worst = worst.max((a - b).abs() / a.max(b));
        }
    }
    Ok(worst)
}
