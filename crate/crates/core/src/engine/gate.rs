use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{qubit_count, CMatrix};

const UNITARY_TOL: f64 = 1e-9;

/// A register slot addressed by role rather than by global position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    Alice(usize),
    Channel(usize),
    Bob(usize),
}

/// A matrix verified unitary within `1e-9` at construction.
#[derive(Debug, Clone)]
pub struct Unitary(Arc<CMatrix>);

impl Unitary {
    pub fn new(m: CMatrix) -> Result<Self> {
        if qubit_count(m.rows()).is_none() || !m.is_square() {
            return Err(Error::InvalidArgument(format!("{}x{} is not a qubit operator", m.rows(), m.cols())));
        }
        let defect = m.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::ContractViolation(format!("step operator is not unitary (defect {defect:.3e})")));
        }
        Ok(Self(Arc::new(m)))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn qubits(&self) -> usize {
        self.0.rows().trailing_zeros() as usize
    }
}

/// A basis permutation on `2^k` states, verified bijective at construction.
#[derive(Debug, Clone)]
pub struct Permutation(Arc<[usize]>);

impl Permutation {
    pub fn new(table: Vec<usize>) -> Result<Self> {
        if qubit_count(table.len()).is_none() {
            return Err(Error::InvalidArgument(format!("permutation table of length {}", table.len())));
        }
        let mut seen = vec![false; table.len()];
        for &t in &table {
            if t >= table.len() || std::mem::replace(&mut seen[t], true) {
                return Err(Error::ContractViolation("classical map is not a bijection".into()));
            }
        }
        Ok(Self(table.into()))
    }

    pub fn from_fn(qubits: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        Self::new((0..1usize << qubits).map(f).collect())
    }

    pub fn image(&self, l: usize) -> usize {
        self.0[l]
    }

    pub fn qubits(&self) -> usize {
        self.0.len().trailing_zeros() as usize
    }
}

/// One party-local operation inside a protocol step.
#[derive(Debug, Clone)]
pub enum Gate {
    Dense { targets: Vec<Qubit>, unitary: Unitary },
    Classical { targets: Vec<Qubit>, map: Permutation },
}

impl Gate {
    pub fn dense(targets: Vec<Qubit>, unitary: Unitary) -> Result<Self> {
        if unitary.qubits() != targets.len() {
            return Err(Error::InvalidArgument(format!(
                "{}-qubit unitary on {} targets",
                unitary.qubits(),
                targets.len()
            )));
        }
        Ok(Gate::Dense { targets, unitary })
    }

    pub fn classical(targets: Vec<Qubit>, map: Permutation) -> Result<Self> {
        if map.qubits() != targets.len() {
            return Err(Error::InvalidArgument(format!(
                "{}-qubit permutation on {} targets",
                map.qubits(),
                targets.len()
            )));
        }
        Ok(Gate::Classical { targets, map })
    }

    /// Classical reversible map on `targets` given as a function of the local basis index.
    pub fn classical_fn(targets: Vec<Qubit>, f: impl Fn(usize) -> usize) -> Result<Self> {
        let map = Permutation::from_fn(targets.len(), f)?;
        Self::classical(targets, map)
    }

    pub fn swap(a: Qubit, b: Qubit) -> Self {
        Gate::Classical { targets: vec![a, b], map: Permutation::new(vec![0, 2, 1, 3]).expect("swap is a bijection") }
    }

    pub fn x(q: Qubit) -> Self {
        Gate::Classical { targets: vec![q], map: Permutation::new(vec![1, 0]).expect("not is a bijection") }
    }

    /// Structural equality: same targets and the same operator.
    pub fn same_as(&self, other: &Gate) -> bool {
        match (self, other) {
            (Gate::Dense { targets: a, unitary: u }, Gate::Dense { targets: b, unitary: v }) => {
                a == b && (Arc::ptr_eq(&u.0, &v.0) || u.0.as_slice() == v.0.as_slice())
            }
            (Gate::Classical { targets: a, map: f }, Gate::Classical { targets: b, map: g }) => {
                a == b && (Arc::ptr_eq(&f.0, &g.0) || f.0 == g.0)
            }
            _ => false,
        }
    }

    pub fn targets(&self) -> &[Qubit] {
        match self {
            Gate::Dense { targets, .. } | Gate::Classical { targets, .. } => targets,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn unitaries_and_permutations_are_checked() {
        let bad =
            CMatrix::new(2, 2, vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(Unitary::new(bad.unwrap()), Err(Error::ContractViolation(_))));
        assert!(Unitary::new(CMatrix::identity(3)).is_err());
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![1, 0, 2]).is_err());
        assert_eq!(Permutation::from_fn(2, |l| 3 - l).unwrap().image(1), 2);
    }

    #[test]
    fn gate_arity_must_match() {
        let u = Unitary::new(CMatrix::identity(4)).unwrap();
        assert!(Gate::dense(vec![Qubit::Alice(0)], u).is_err());
        assert_eq!(Gate::swap(Qubit::Alice(0), Qubit::Bob(0)).targets().len(), 2);
    }
}
