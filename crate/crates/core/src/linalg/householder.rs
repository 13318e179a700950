use super::{CMatrix, CVector, ONE, ZERO};
use crate::error::{Error, Result};

/// A unitary whose first column is the unit vector `v`.
///
/// Built as a Householder reflection followed by a phase on `e_0`.
pub fn unitary_with_first_column(v: &CVector) -> Result<CMatrix> {
    let d = v.dim();
    if d == 0 || (v.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument("first column must be a unit vector".into()));
    }
    let v0 = v[0];
    let phase = if v0.norm() > 0.0 { v0 / v0.norm() } else { ONE };
    // H maps phase·e_0 to v; then U = H·diag(phase, 1, ..., 1).
    let mut w = v.clone();
    w[0] -= phase;
    let wn = w.norm_sqr();
    let mut u = CMatrix::from_fn(d, d, |r, c| {
        let id = if r == c { ONE } else { ZERO };
        if wn < 1e-30 {
            id
        } else {
            id - w[r] * w[c].conj() * (2.0 / wn)
        }
    });
    for r in 0..d {
        u[(r, 0)] *= phase;
    }
    Ok(u)
}
