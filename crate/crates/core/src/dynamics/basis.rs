use crate::atomic::Spin;
use crate::half::Half;

use super::DynamicsError;

/// Atomic part of the product basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomLevel {
    Ground(Spin),
    /// ³P₁(F′=3/2) sublevel with the given m′.
    Excited(Half),
}

impl AtomLevel {
    pub const ALL: [AtomLevel; 6] = [
        AtomLevel::Ground(Spin::Up),
        AtomLevel::Ground(Spin::Down),
        AtomLevel::Excited(Half::MINUS_THREE_HALVES),
        AtomLevel::Excited(Half::MINUS_HALF),
        AtomLevel::Excited(Half::HALF),
        AtomLevel::Excited(Half::THREE_HALVES),
    ];

    pub fn index(self) -> usize {
        match self {
            AtomLevel::Ground(Spin::Up) => 0,
            AtomLevel::Ground(Spin::Down) => 1,
            AtomLevel::Excited(m) => 2 + ((m.twice() + 3) / 2) as usize,
        }
    }

    pub fn excited(m: Half) -> Option<AtomLevel> {
        (!m.is_integer() && m.abs() <= Half::THREE_HALVES).then_some(AtomLevel::Excited(m))
    }

    pub fn is_excited(self) -> bool {
        matches!(self, AtomLevel::Excited(_))
    }
}

pub const ATOM_DIM: usize = 6;

/// Product basis atom ⊗ Fock(σ⁺) ⊗ Fock(σ⁻), index
/// `atom·N² + n₊·N + n₋` with `N = n_max + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Basis {
    n_max: usize,
}

impl Basis {
    pub fn new(n_max: usize) -> Result<Self, DynamicsError> {
        if n_max < 1 {
            return Err(DynamicsError::FockCutoff);
        }
        Ok(Basis { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        ATOM_DIM * self.fock_dim() * self.fock_dim()
    }

    pub fn index(&self, atom: AtomLevel, n_plus: usize, n_minus: usize) -> usize {
        let n = self.fock_dim();
        debug_assert!(n_plus < n && n_minus < n);
        atom.index() * n * n + n_plus * n + n_minus
    }

    /// Inverse of [`Basis::index`].
    pub fn decompose(&self, index: usize) -> (AtomLevel, usize, usize) {
        let n = self.fock_dim();
        let atom = AtomLevel::ALL[index / (n * n)];
        let rest = index % (n * n);
        (atom, rest / n, rest % n)
    }

    /// Iterates over every `(index, atom, n₊, n₋)`.
    pub fn states(&self) -> impl Iterator<Item = (usize, AtomLevel, usize, usize)> + '_ {
        (0..self.dim()).map(move |i| {
            let (a, p, m) = self.decompose(i);
            (i, a, p, m)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        let b = Basis::new(2).unwrap();
        assert_eq!(b.dim(), 54);
        for (i, a, p, m) in b.states() {
            assert_eq!(b.index(a, p, m), i);
        }
        for (k, a) in AtomLevel::ALL.iter().enumerate() {
            assert_eq!(a.index(), k);
        }
    }

    #[test]
    fn zero_cutoff_rejected() {
        assert!(Basis::new(0).is_err());
    }
}
