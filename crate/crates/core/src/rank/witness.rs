use serde::Serialize;

use super::comm::CommMatrix;
use crate::error::{Error, Result};
use crate::linalg::{exact_rank_scaled, numeric_rank, CMatrix};

/// A matrix whose nonzero pattern is exactly the 1-set of `target`, so that
/// `nrank(target) ≤ rank`.
#[derive(Debug, Clone)]
pub struct NdetWitness {
    pub matrix: CMatrix,
    pub target: CommMatrix,
    pub rank: usize,
    pub tol: f64,
}

/// Serialized form of a witness check or audit outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub target: String,
    pub n: usize,
    pub rank: usize,
    pub pattern_ok: bool,
    pub counterexamples: Vec<(usize, usize)>,
}

impl WitnessReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}

impl NdetWitness {
    pub fn report(&self) -> WitnessReport {
        WitnessReport {
            target: self.target.name.to_string(),
            n: self.target.n,
            rank: self.rank,
            pattern_ok: true,
            counterexamples: vec![],
        }
    }

    /// Exact rank when the real parts are dyadic with denominator `2^20` and
    /// the imaginary parts vanish.
    pub fn exact_rank(&self) -> Option<usize> {
        if self.matrix.as_slice().iter().any(|v| v.im != 0.0) {
            return None;
        }
        let d = self.matrix.rows();
        let rows: Vec<Vec<f64>> = (0..d).map(|x| self.matrix.row(x).iter().map(|v| v.re).collect()).collect();
        exact_rank_scaled(&rows, 1 << 20)
    }
}

/// Entries where `|m_xy| > tol·max|m|` disagrees with `target(x, y) = 1`.
pub fn pattern_counterexamples(m: &CMatrix, target: &CommMatrix, tol: f64) -> Vec<(usize, usize)> {
    let threshold = tol * m.max_abs();
    let d = target.dim();
    let mut bad = Vec::new();
    for x in 0..d {
        for y in 0..d {
            let nonzero = m[(x, y)].norm() > threshold && m.max_abs() > 0.0;
            if nonzero != target.get(x as u64, y as u64) {
                bad.push((x, y));
            }
        }
    }
    bad
}

/// Checks that `m` is a non-deterministic matrix for `target`.
pub fn verify_ndet_witness(m: &CMatrix, target: &CommMatrix, tol: f64) -> Result<NdetWitness> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    if m.rows() != target.dim() || m.cols() != target.dim() {
        return Err(Error::InvalidArgument(format!(
            "{}x{} matrix against a {}x{} target",
            m.rows(),
            m.cols(),
            target.dim(),
            target.dim()
        )));
    }
    let counterexamples = pattern_counterexamples(m, target, tol);
    if !counterexamples.is_empty() {
        return Err(Error::PatternMismatch { counterexamples });
    }
    let rank = numeric_rank(m, tol)?;
    Ok(NdetWitness { matrix: m.clone(), target: target.clone(), rank, tol })
}

/// Report for a candidate witness, whether or not it passes.
pub fn witness_report(m: &CMatrix, target: &CommMatrix, tol: f64) -> Result<WitnessReport> {
    match verify_ndet_witness(m, target, tol) {
        Ok(w) => Ok(w.report()),
        Err(Error::PatternMismatch { counterexamples }) => Ok(WitnessReport {
            target: target.name.to_string(),
            n: target.n,
            rank: numeric_rank(m, tol)?,
            pattern_ok: false,
            counterexamples,
        }),
        Err(e) => Err(e),
    }
}

/// The matrices used as canonical witnesses.
pub mod canonical {
    use crate::error::{Error, Result};
    use crate::linalg::{CMatrix, C64};
    use crate::rank::FunctionName;

    /// Identity for EQ, differences for NEQ, common-ones for INT and the 0/1
    /// table for DISJ.
    pub fn for_function(name: FunctionName, n: usize) -> Result<CMatrix> {
        match name {
            FunctionName::Eq => Ok(identity(n)),
            FunctionName::Neq => Ok(difference(n)),
            FunctionName::Int => Ok(common_ones(n)),
            FunctionName::Disj => Ok(disjointness(n)),
            FunctionName::Custom => Err(Error::InvalidArgument("custom functions have no canonical witness".into())),
        }
    }

    pub fn identity(n: usize) -> CMatrix {
        CMatrix::identity(1 << n)
    }

    /// `a_x - a_y` with `a_x` the integer value of `x`.
    pub fn difference(n: usize) -> CMatrix {
        let d = 1 << n;
        CMatrix::from_fn(d, d, |x, y| C64::new(x as f64 - y as f64, 0.0))
    }

    /// Number of common ones, `|x ∧ y|`.
    pub fn common_ones(n: usize) -> CMatrix {
        let d = 1 << n;
        CMatrix::from_fn(d, d, |x, y| C64::new((x & y).count_ones() as f64, 0.0))
    }

    /// The 0/1 disjointness table, which is upper triangular after pairing each
    /// row with the complement of its column.
    pub fn disjointness(n: usize) -> CMatrix {
        let d = 1 << n;
        CMatrix::from_fn(d, d, |x, y| C64::new(if x & y == 0 { 1.0 } else { 0.0 }, 0.0))
    }
}
