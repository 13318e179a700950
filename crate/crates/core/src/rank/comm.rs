use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::csv_rows;
use crate::linalg::{CMatrix, C64};

/// Largest input width for explicit communication matrices.
pub const MAX_COMM_BITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FunctionName {
    Eq,
    Neq,
    Disj,
    Int,
    Custom,
}

impl FunctionName {
    /// Defining formula of a named function; `None` for `Custom`.
    pub fn eval(self, x: u64, y: u64) -> Option<bool> {
        match self {
            FunctionName::Eq => Some(x == y),
            FunctionName::Neq => Some(x != y),
            FunctionName::Int => Some(x & y != 0),
            FunctionName::Disj => Some(x & y == 0),
            FunctionName::Custom => None,
        }
    }
}

impl fmt::Display for FunctionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionName::Eq => "EQ",
            FunctionName::Neq => "NEQ",
            FunctionName::Disj => "DISJ",
            FunctionName::Int => "INT",
            FunctionName::Custom => "custom",
        })
    }
}

impl FromStr for FunctionName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EQ" => Ok(FunctionName::Eq),
            "NEQ" => Ok(FunctionName::Neq),
            "DISJ" => Ok(FunctionName::Disj),
            "INT" => Ok(FunctionName::Int),
            "CUSTOM" => Ok(FunctionName::Custom),
            other => Err(Error::InvalidArgument(format!("unknown function {other:?}"))),
        }
    }
}

/// The `2^n x 2^n` table of a Boolean function `f(x, y)`; row `x`, column `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommMatrix {
    pub n: usize,
    pub name: FunctionName,
    values: Vec<Vec<u8>>,
}

#[derive(Serialize)]
struct CommMatrixJson<'a> {
    n: usize,
    values: &'a [Vec<u8>],
}

impl CommMatrix {
    pub fn custom(n: usize, values: Vec<Vec<u8>>) -> Result<Self> {
        let dim = 1usize << n;
        if values.len() != dim || values.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument(format!("table for n={n} must be {dim}x{dim}")));
        }
        if values.iter().flatten().any(|&v| v > 1) {
            return Err(Error::InvalidArgument("communication matrix entries must be 0 or 1".into()));
        }
        Ok(Self { n, name: FunctionName::Custom, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(u64, u64) -> bool) -> Result<Self> {
        let dim = 1u64 << n;
        Self::custom(n, (0..dim).map(|x| (0..dim).map(|y| u8::from(f(x, y))).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, x: u64, y: u64) -> bool {
        self.values[x as usize][y as usize] == 1
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.values
    }

    /// Entries as a real 0/1 matrix.
    pub fn to_cmatrix(&self) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |x, y| C64::new(f64::from(self.values[x][y]), 0.0))
    }

    pub fn ones(&self) -> usize {
        self.values.iter().flatten().filter(|&&v| v == 1).count()
    }

    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self.values.iter().map(|r| r.iter().map(|&v| f64::from(v)).collect()).collect();
        csv_rows(rows.iter())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CommMatrixJson { n: self.n, values: &self.values }).expect("plain data")
    }
}

/// Builds a named communication matrix from its defining formula.
pub fn build_comm_matrix(name: FunctionName, n: usize) -> Result<CommMatrix> {
    if n == 0 || n > MAX_COMM_BITS {
        return Err(Error::InvalidArgument(format!("n must be in 1..={MAX_COMM_BITS}, got {n}")));
    }
    if name == FunctionName::Custom {
        return Err(Error::InvalidArgument("custom matrices have no defining formula".into()));
    }
    let mut m = CommMatrix::from_fn(n, |x, y| name.eval(x, y).expect("named"))?;
    m.name = name;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eq_two_is_identity() {
        let m = build_comm_matrix(FunctionName::Eq, 2).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(m.get(x, y), x == y);
            }
        }
    }

    #[test]
    fn disj_two_has_nine_ones() {
        let m = build_comm_matrix(FunctionName::Disj, 2).unwrap();
        assert_eq!(m.ones(), 9);
        let int = build_comm_matrix(FunctionName::Int, 2).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_ne!(m.get(x, y), int.get(x, y));
            }
        }
    }

    #[test]
    fn int_one_has_single_one() {
        let m = build_comm_matrix(FunctionName::Int, 1).unwrap();
        assert_eq!(m.rows(), &[vec![0, 0], vec![0, 1]]);
        assert_eq!(m.to_json(), r#"{"n":1,"values":[[0,0],[0,1]]}"#);
    }

    #[test]
    fn csv_and_errors() {
        assert_eq!(build_comm_matrix(FunctionName::Disj, 1).unwrap().to_csv(), "1,1\n1,0\n");
        assert!(build_comm_matrix(FunctionName::Eq, 0).is_err());
        assert!(build_comm_matrix(FunctionName::Custom, 2).is_err());
        assert!("XOR".parse::<FunctionName>().is_err());
        assert_eq!("neq".parse::<FunctionName>().unwrap(), FunctionName::Neq);
    }
}
