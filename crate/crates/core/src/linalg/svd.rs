//! One-sided (Hestenes) Jacobi SVD for small dense complex matrices.
//!
//! Results are stored in the product form `A = U · Σ · V`, where `V` is the
//! adjoint of the conventional right singular factor.

use super::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Default relative threshold for counting a singular value as nonzero.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 80;
const ORTHO_EPS: f64 = 1e-15;

/// `A = u · diag(sigma) · v`, with `u` (rows x rows) and `v` (cols x cols) unitary
/// and `sigma` (length `min(rows, cols)`) sorted descending.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl SvdResult {
    /// The rectangular `Σ` matching the factor shapes.
    pub fn sigma_matrix(&self) -> CMatrix {
        let mut s = CMatrix::zeros(self.u.cols(), self.v.rows());
        for (i, &x) in self.sigma.iter().enumerate() {
            s[(i, i)] = C64::new(x, 0.0);
        }
        s
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.u
            .matmul(&self.sigma_matrix())
            .and_then(|us| us.matmul(&self.v))
            .expect("factor shapes are consistent by construction")
    }

    pub fn rank(&self, tol: f64) -> usize {
        let max = self.sigma.first().copied().unwrap_or(0.0);
        if max == 0.0 {
            return 0;
        }
        self.sigma.iter().filter(|&&s| s > tol * max).count()
    }
}

/// Singular value decomposition of `m` in the `U Σ V` product convention.
pub fn svd(m: &CMatrix) -> Result<SvdResult> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::InvalidArgument("svd of an empty matrix".into()));
    }
    if m.rows() >= m.cols() {
        tall_svd(m)
    } else {
        // A^H = U' Σ V'^H  =>  A = V' Σ U'^H; in product form u = V', v = U'^H.
        let t = tall_svd(&m.adjoint())?;
        Ok(SvdResult { u: t.v.adjoint(), sigma: t.sigma, v: t.u.adjoint() })
    }
}

/// Number of singular values above `tol · sigma_max` (0 for the zero matrix).
pub fn numeric_rank(m: &CMatrix, tol: f64) -> Result<usize> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("rank tolerance must be positive, got {tol}")));
    }
    if m.max_abs() == 0.0 {
        return Ok(0);
    }
    Ok(svd(m)?.rank(tol))
}

fn tall_svd(a: &CMatrix) -> Result<SvdResult> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut w: Vec<Vec<C64>> = (0..cols).map(|c| a.column(c).into_vec()).collect();
    let mut v: Vec<Vec<C64>> =
        (0..cols).map(|c| (0..cols).map(|r| if r == c { C64::new(1.0, 0.0) } else { ZERO }).collect()).collect();

    // Columns this small are round-off from a rank-deficient input.
    let frob2: f64 = a.as_slice().iter().map(|z| z.norm_sqr()).sum();
    let negligible = 1e-26 * frob2;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= ORTHO_EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(format!("Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")));
    }

    let mut order: Vec<(f64, usize)> =
        w.iter().enumerate().map(|(j, col)| (col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), j)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0));
    // Below this the column was never rotated, so it is not orthogonal to the rest.
    let null_cut = 1e-11 * frob2.sqrt();
    let sigma: Vec<f64> = order.iter().map(|o| if o.0 > null_cut { o.0 } else { 0.0 }).collect();

    let mut ucols: Vec<Vec<C64>> = Vec::with_capacity(rows);
    for &(s, j) in &order {
        if s > null_cut {
            ucols.push(w[j].iter().map(|z| z / s).collect());
        } else {
            break;
        }
    }
    complete_basis(&mut ucols, rows);

    let u = CMatrix::from_fn(rows, rows, |r, c| ucols[c][r]);
    // V_conventional has columns v[order[k].1]; product form takes its adjoint.
    let vmat = CMatrix::from_fn(cols, cols, |r, c| v[order[r].1][c].conj());
    Ok(SvdResult { u, sigma, v: vmat })
}

fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let (head, tail) = cols.split_at_mut(q);
    let (cp, cq) = (&mut head[p], &mut tail[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = xp * c - yq * phase.conj() * s;
        *y = xp * phase * s + yq * c;
    }
}

/// Extends orthonormal `cols` to a basis of `C^dim` using standard basis vectors.
fn complete_basis(cols: &mut Vec<Vec<C64>>, dim: usize) {
    let mut k = 0;
    while cols.len() < dim && k < dim {
        let mut cand: Vec<C64> = (0..dim).map(|i| if i == k { C64::new(1.0, 0.0) } else { ZERO }).collect();
        for _ in 0..2 {
            for q in cols.iter() {
                let proj: C64 = q.iter().zip(&cand).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in cand.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
        }
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(cand.into_iter().map(|z| z / norm).collect());
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_complex_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_has_unit_singular_values() {
        let r = svd(&CMatrix::identity(4)).unwrap();
        assert!(r.sigma.iter().all(|&s| (s - 1.0).abs() < 1e-12));
    }

    #[test]
    fn diagonal_with_zero() {
        let m = CMatrix::from_real(2, 2, &[3.0, 0.0, 0.0, 0.0]).unwrap();
        let r = svd(&m).unwrap();
        assert!((r.sigma[0] - 3.0).abs() < 1e-12 && r.sigma[1] == 0.0);
        assert!(r.u.is_unitary(1e-12) && r.v.is_unitary(1e-12));
        assert!(r.reconstruct().max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn common_ones_matrix_has_rank_two() {
        let m = CMatrix::from_fn(4, 4, |x, y| C64::new((x & y).count_ones() as f64, 0.0));
        let r = svd(&m).unwrap();
        assert_eq!(r.rank(DEFAULT_RANK_TOL), 2);
        assert!(r.reconstruct().max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn wide_and_tall_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (r, c) in [(3, 7), (7, 3), (1, 5), (5, 1)] {
            let m = random_complex_matrix(&mut rng, r, c);
            let s = svd(&m).unwrap();
            assert_eq!(s.u.rows(), r);
            assert_eq!(s.v.rows(), c);
            assert!(s.u.is_unitary(1e-9) && s.v.is_unitary(1e-9));
            assert!(s.reconstruct().max_abs_diff(&m) < 1e-10 * m.max_abs().max(1.0));
        }
    }

    #[test]
    fn rank_deficient_large_matrix_has_unitary_factors() {
        let m = CMatrix::from_fn(256, 256, |x, y| C64::new((x & y).count_ones() as f64, 0.0));
        let r = svd(&m).unwrap();
        assert_eq!(r.rank(DEFAULT_RANK_TOL), 8);
        assert!(r.u.is_unitary(1e-9) && r.v.is_unitary(1e-9));
        assert!(r.reconstruct().max_abs_diff(&m) < 1e-9);
    }

    #[test]
    fn rank_edge_cases() {
        assert_eq!(numeric_rank(&CMatrix::identity(8), 1e-9).unwrap(), 8);
        assert_eq!(numeric_rank(&CMatrix::zeros(4, 4), 1e-9).unwrap(), 0);
        assert!(numeric_rank(&CMatrix::identity(2), 0.0).is_err());
        assert!(svd(&CMatrix::zeros(0, 3)).is_err());
    }
}
