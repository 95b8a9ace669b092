use num_complex::Complex64;

use crate::atomic::{decay_branching, excited_projection, transition_weight, Polarization, Spin};

use super::basis::{AtomLevel, Basis};
use super::sparse::CsrMatrix;
use super::{mode_index, CavityParams, DynamicsError, LocalConditions};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Operator on the atom ⊗ two-mode Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    pub basis: Basis,
    pub matrix: CsrMatrix,
}

impl Operator {
    pub fn new(basis: Basis, matrix: CsrMatrix) -> Result<Self, DynamicsError> {
        if matrix.rows() != basis.dim() || matrix.cols() != basis.dim() {
            return Err(DynamicsError::Dimension {
                expected: basis.dim(),
                found: matrix.rows().max(matrix.cols()),
            });
        }
        Ok(Operator { basis, matrix })
    }

    pub fn adjoint(&self) -> Self {
        Operator {
            basis: self.basis,
            matrix: self.matrix.adjoint(),
        }
    }

    /// max |H - H†| over matrix elements.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.matrix.adjoint();
        self.matrix
            .triplets()
            .chain(adj.triplets())
            .map(|(r, c, _)| (self.matrix.get(r, c) - adj.get(r, c)).norm())
            .fold(0.0, f64::max)
    }

    /// Photon annihilation operator of mode 0 (σ⁺) or 1 (σ⁻).
    pub fn annihilation(basis: Basis, mode: usize) -> Self {
        let mut t = Vec::new();
        for (i, atom, np, nm) in basis.states() {
            let n = if mode == 0 { np } else { nm };
            if n == 0 {
                continue;
            }
            let j = if mode == 0 {
                basis.index(atom, np - 1, nm)
            } else {
                basis.index(atom, np, nm - 1)
            };
            t.push((j, i, re((n as f64).sqrt())));
        }
        Operator {
            basis,
            matrix: CsrMatrix::from_triplets(basis.dim(), basis.dim(), t),
        }
    }

    /// `Σ c |to⟩⟨from| ⊗ 1_Fock` for atomic transitions `(to, from, c)`.
    pub fn atomic(basis: Basis, terms: &[(AtomLevel, AtomLevel, f64)]) -> Self {
        let n = basis.fock_dim();
        let mut t = Vec::new();
        for &(to, from, c) in terms {
            for np in 0..n {
                for nm in 0..n {
                    t.push((basis.index(to, np, nm), basis.index(from, np, nm), re(c)));
                }
            }
        }
        Operator {
            basis,
            matrix: CsrMatrix::from_triplets(basis.dim(), basis.dim(), t),
        }
    }
}

/// Ground spin, excited level and Clebsch-Gordan weight for each allowed
/// absorption of `pol` from the ground manifold.
fn absorptions(pol: Polarization) -> impl Iterator<Item = (Spin, AtomLevel, f64)> {
    [Spin::Up, Spin::Down].into_iter().filter_map(move |spin| {
        let m_e = excited_projection(spin.m(), pol).ok()?;
        let e = AtomLevel::excited(m_e)?;
        let w = transition_weight(spin.m(), pol).ok()?;
        (w > 0.0).then_some((spin, e, w))
    })
}

/// Rotating-frame Hamiltonian (ħ = 1, rad/s) at the drive frequency.
///
/// Excited sublevel m′ sits at `δ(m′) - Δ_e`, each cavity mode at the
/// cavity-drive detuning. Cavity mode q couples ground m to m′ = m + q with
/// `g√w`; the classical drive component of polarization q couples them with
/// `Ω_q√w/2`.
pub fn build_hamiltonian(basis: Basis, conditions: &LocalConditions) -> Operator {
    let n = basis.fock_dim();
    let mut t: Vec<(usize, usize, Complex64)> = Vec::new();
    for (i, atom, np, nm) in basis.states() {
        let mut diag = conditions.cavity_detuning * (np + nm) as f64;
        if let AtomLevel::Excited(m) = atom {
            diag += conditions.shifts.for_sublevel(m) - conditions.excitation_detuning;
        }
        if diag != 0.0 {
            t.push((i, i, re(diag)));
        }
    }
    for pol in [Polarization::SigmaPlus, Polarization::SigmaMinus] {
        let mode = mode_index(pol).unwrap();
        for (spin, e, w) in absorptions(pol) {
            let gw = conditions.coupling * w.sqrt();
            if gw == 0.0 {
                continue;
            }
            let g = AtomLevel::Ground(spin);
            for np in 0..n {
                for nm in 0..n {
                    let (tp, tm) = if mode == 0 { (np + 1, nm) } else { (np, nm + 1) };
                    if tp >= n || tm >= n {
                        continue;
                    }
                    let photons = if mode == 0 { tp } else { tm };
                    let amp = re(gw * (photons as f64).sqrt());
                    let lower = basis.index(g, tp, tm);
                    let upper = basis.index(e, np, nm);
                    t.push((lower, upper, amp));
                    t.push((upper, lower, amp));
                }
            }
        }
    }
    for pol in Polarization::ALL {
        let omega2 = conditions.drive_component(pol);
        if omega2 <= 0.0 {
            continue;
        }
        for (spin, e, w) in absorptions(pol) {
            let amp = re(0.5 * (omega2 * w).sqrt());
            let g = AtomLevel::Ground(spin);
            for np in 0..n {
                for nm in 0..n {
                    let lower = basis.index(g, np, nm);
                    let upper = basis.index(e, np, nm);
                    t.push((lower, upper, amp));
                    t.push((upper, lower, amp));
                }
            }
        }
    }
    Operator {
        basis,
        matrix: CsrMatrix::from_triplets(basis.dim(), basis.dim(), t),
    }
}

/// Collapse operators: `√(2κ)·a₊`, `√(2κ)·a₋`, and one free-space channel
/// per photon polarization, `√(2γ)·Σ √w |g⟩⟨e|`.
pub fn collapse_operators(basis: Basis, cavity: &CavityParams) -> Vec<Operator> {
    let mut out = Vec::with_capacity(5);
    let ck = (2.0 * cavity.kappa).sqrt();
    for mode in 0..2 {
        let mut a = Operator::annihilation(basis, mode);
        a.matrix = scale(&a.matrix, ck);
        out.push(a);
    }
    let cg = (2.0 * cavity.gamma).sqrt();
    for pol in Polarization::ALL {
        let mut terms = Vec::new();
        for level in AtomLevel::ALL {
            let AtomLevel::Excited(m) = level else { continue };
            for b in decay_branching(m).expect("valid excited sublevel") {
                if b.polarization == pol {
                    let g = AtomLevel::Ground(Spin::from_m(b.ground_m).unwrap());
                    terms.push((g, level, cg * b.fraction.sqrt()));
                }
            }
        }
        if !terms.is_empty() {
            out.push(Operator::atomic(basis, &terms));
        }
    }
    out
}

fn scale(m: &CsrMatrix, c: f64) -> CsrMatrix {
    CsrMatrix::from_triplets(m.rows(), m.cols(), m.triplets().map(|(r, k, v)| (r, k, v * c)).collect())
}

fn product(a: &CsrMatrix, b: &CsrMatrix) -> CsrMatrix {
    let mut t = Vec::new();
    for (r, k, va) in a.triplets() {
        for (c, vb) in b.row(k) {
            t.push((r, c, va * vb));
        }
    }
    CsrMatrix::from_triplets(a.rows(), b.cols(), t)
}

/// Lindblad superoperator acting on row-major vectorized density matrices,
/// `vec(ρ)[i·d + j] = ρᵢⱼ`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub basis: Basis,
    pub matrix: CsrMatrix,
}

impl Generator {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn apply(&self, rho: &[Complex64]) -> Vec<Complex64> {
        self.matrix.mul_vec(rho)
    }

    pub fn apply_into(&self, rho: &[Complex64], out: &mut [Complex64]) {
        self.matrix.mul_vec_into(rho, out)
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm_inf()
    }

    pub fn zero(basis: Basis) -> Self {
        let d2 = basis.dim() * basis.dim();
        Generator {
            basis,
            matrix: CsrMatrix::zeros(d2, d2),
        }
    }
}

/// `L ρ = -i[H, ρ] + Σ (C ρ C† - ½{C†C, ρ})` with the channels of
/// [`collapse_operators`].
pub fn build_lindblad(h: &Operator, cavity: &CavityParams) -> Result<Generator, DynamicsError> {
    let basis = h.basis;
    if h.matrix.rows() != basis.dim() {
        return Err(DynamicsError::Dimension {
            expected: basis.dim(),
            found: h.matrix.rows(),
        });
    }
    let collapse = collapse_operators(basis, cavity);
    Ok(lindblad_from_parts(h, &collapse))
}

pub(crate) fn lindblad_from_parts(h: &Operator, collapse: &[Operator]) -> Generator {
    let basis = h.basis;
    let d = basis.dim();
    // K = H - (i/2) Σ C†C, so L ρ = -iKρ + iρK† + Σ CρC†.
    let mut k_trip: Vec<(usize, usize, Complex64)> = h.matrix.triplets().collect();
    for c in collapse {
        let cdc = product(&c.matrix.adjoint(), &c.matrix);
        k_trip.extend(cdc.triplets().map(|(r, k, v)| (r, k, -0.5 * I * v)));
    }
    let k = CsrMatrix::from_triplets(d, d, k_trip);
    let mut t: Vec<(usize, usize, Complex64)> = Vec::new();
    for (i, kk, v) in k.triplets() {
        let a = -I * v;
        for j in 0..d {
            t.push((i * d + j, kk * d + j, a));
        }
    }
    // (ρ K†)ᵢⱼ = Σₗ ρᵢₗ conj(K_jl)
    for (j, l, v) in k.triplets() {
        let b = I * v.conj();
        for i in 0..d {
            t.push((i * d + j, i * d + l, b));
        }
    }
    for c in collapse {
        // (C ρ C†)ᵢⱼ = Σ C_ik ρ_kl conj(C_jl)
        let trip: Vec<_> = c.matrix.triplets().collect();
        for &(i, kk, a) in &trip {
            for &(j, l, b) in &trip {
                t.push((i * d + j, kk * d + l, a * b.conj()));
            }
        }
    }
    t.retain(|&(_, _, v)| v != ZERO);
    Generator {
        basis,
        matrix: CsrMatrix::from_triplets(d * d, d * d, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lightshift::ShiftResult;

    fn conditions(g: f64, omega2: f64) -> LocalConditions {
        LocalConditions {
            coupling: g,
            drive_rabi_squared: [omega2 / 2.0, 0.0, omega2 / 2.0],
            excitation_detuning: 2.0e6,
            cavity_detuning: 0.0,
            shifts: ShiftResult::new(4.0e7, -8.0e7),
        }
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let b = Basis::new(2).unwrap();
        let h = build_hamiltonian(b, &conditions(1.0e7, 1.0e12));
        assert!(h.hermiticity_defect() < 1e-12 * h.matrix.norm_inf());
    }

    #[test]
    fn vacuum_coupling_at_mode_center() {
        let b = Basis::new(1).unwrap();
        let g = 1.76e7;
        let h = build_hamiltonian(b, &conditions(g, 0.0));
        let up0 = b.index(AtomLevel::Ground(Spin::Up), 1, 0);
        let e = b.index(AtomLevel::Excited(crate::Half::THREE_HALVES), 0, 0);
        assert!((h.matrix.get(up0, e).re - g).abs() < 1e-6);
        let dn = b.index(AtomLevel::Ground(Spin::Down), 1, 0);
        let e12 = b.index(AtomLevel::Excited(crate::Half::HALF), 0, 0);
        assert!((h.matrix.get(dn, e12).re - g / 3f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn no_drive_leaves_ground_vacuum_isolated() {
        let b = Basis::new(2).unwrap();
        let h = build_hamiltonian(b, &conditions(1.0e7, 0.0));
        for spin in [Spin::Up, Spin::Down] {
            let i = b.index(AtomLevel::Ground(spin), 0, 0);
            assert_eq!(h.matrix.row(i).count(), 0);
        }
    }

    #[test]
    fn generator_preserves_trace() {
        let b = Basis::new(1).unwrap();
        let cav = CavityParams::default();
        let h = build_hamiltonian(b, &conditions(1.0e7, 1.0e12));
        let l = build_lindblad(&h, &cav).unwrap();
        let d = b.dim();
        // every column of L must produce a traceless output
        let mut trace_row = vec![ZERO; d * d];
        for (r, c, v) in l.matrix.triplets() {
            if r / d == r % d {
                trace_row[c] += v;
            }
        }
        let worst = trace_row.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(worst < 1e-10 * l.norm(), "{worst}");
    }
}
