use ndarray::Array2;
use ndarray_linalg::{EigValsh, UPLO};
use num_complex::Complex64;

use crate::atomic::Spin;

use super::basis::{AtomLevel, Basis};
use super::DynamicsError;

/// Density matrix on the atom ⊗ Fock(σ⁺) ⊗ Fock(σ⁻) space.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemState {
    pub basis: Basis,
    pub rho: Array2<Complex64>,
}

impl SystemState {
    pub fn from_matrix(basis: Basis, rho: Array2<Complex64>) -> Result<Self, DynamicsError> {
        let d = basis.dim();
        if rho.dim() != (d, d) {
            return Err(DynamicsError::Dimension {
                expected: d,
                found: rho.nrows().max(rho.ncols()),
            });
        }
        Ok(SystemState { basis, rho })
    }

    /// Row-major vectorization, as used by [`super::Generator`].
    pub fn from_vec(basis: Basis, v: Vec<Complex64>) -> Result<Self, DynamicsError> {
        let d = basis.dim();
        let rho = Array2::from_shape_vec((d, d), v).map_err(|_| DynamicsError::Dimension {
            expected: d * d,
            found: 0,
        })?;
        Ok(SystemState { basis, rho })
    }

    pub fn to_vec(&self) -> Vec<Complex64> {
        self.rho.iter().copied().collect()
    }

    /// Diagonal state with the given populations per basis index.
    pub fn diagonal(basis: Basis, populations: &[(usize, f64)]) -> Self {
        let d = basis.dim();
        let mut rho = Array2::zeros((d, d));
        for &(i, p) in populations {
            rho[[i, i]] += Complex64::new(p, 0.0);
        }
        SystemState { basis, rho }
    }

    /// Ground spin `spin` with both cavity modes in vacuum.
    pub fn ground(basis: Basis, spin: Spin) -> Self {
        Self::diagonal(basis, &[(basis.index(AtomLevel::Ground(spin), 0, 0), 1.0)])
    }

    /// Incoherent mixture of the two ground spins, cavity in vacuum.
    pub fn ground_mixture(basis: Basis, p_up: f64) -> Self {
        Self::diagonal(
            basis,
            &[
                (basis.index(AtomLevel::Ground(Spin::Up), 0, 0), p_up),
                (basis.index(AtomLevel::Ground(Spin::Down), 0, 0), 1.0 - p_up),
            ],
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.diag().sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.rho.nrows();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.rho[[i, j]] - self.rho[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64, DynamicsError> {
        let herm = (&self.rho + &self.rho.t().mapv(|v| v.conj())) * Complex64::new(0.5, 0.0);
        let ev = herm
            .eigvalsh(UPLO::Lower)
            .map_err(|e| DynamicsError::Linalg(e.to_string()))?;
        Ok(ev.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Checks Hermiticity and unit trace within `tol`, and eigenvalues
    /// above `-eig_tol`.
    pub fn validate(&self, tol: f64, eig_tol: f64) -> Result<(), DynamicsError> {
        let h = self.hermiticity_defect();
        if h > tol {
            return Err(DynamicsError::InvalidState(format!("non-Hermitian by {h:.3e}")));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > tol {
            return Err(DynamicsError::InvalidState(format!("trace {tr}")));
        }
        let lam = self.min_eigenvalue()?;
        if lam < -eig_tol {
            return Err(DynamicsError::InvalidState(format!("eigenvalue {lam:.3e}")));
        }
        Ok(())
    }

    /// Same state in a basis with a larger Fock cutoff.
    pub fn embed(&self, target: Basis) -> Result<Self, DynamicsError> {
        if target.n_max() < self.basis.n_max() {
            return Err(DynamicsError::FockCutoff);
        }
        let map: Vec<usize> = self.basis.states().map(|(_, a, p, m)| target.index(a, p, m)).collect();
        let mut rho = Array2::zeros((target.dim(), target.dim()));
        for ((i, j), &v) in self.rho.indexed_iter() {
            rho[[map[i], map[j]]] = v;
        }
        Ok(SystemState { basis: target, rho })
    }

    /// Mean photon number of mode 0 (σ⁺) or 1 (σ⁻).
    pub fn mean_photons(&self, mode: usize) -> f64 {
        self.basis
            .states()
            .map(|(i, _, np, nm)| {
                let n = if mode == 0 { np } else { nm };
                n as f64 * self.rho[[i, i]].re
            })
            .sum()
    }

    /// Total population of an atomic level, traced over the cavity.
    pub fn atom_population(&self, level: AtomLevel) -> f64 {
        self.basis
            .states()
            .filter(|&(_, a, _, _)| a == level)
            .map(|(i, _, _, _)| self.rho[[i, i]].re)
            .sum()
    }

    /// Populations of ↑ and ↓, traced over the cavity.
    pub fn ground_populations(&self) -> [f64; 2] {
        [
            self.atom_population(AtomLevel::Ground(Spin::Up)),
            self.atom_population(AtomLevel::Ground(Spin::Down)),
        ]
    }

    pub fn excited_population(&self) -> f64 {
        self.basis
            .states()
            .filter(|&(_, a, _, _)| a.is_excited())
            .map(|(i, _, _, _)| self.rho[[i, i]].re)
            .sum()
    }
}
