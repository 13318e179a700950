use rand::Rng;
use serde::Serialize;

use crate::engine::AcceptanceMatrix;
use crate::error::{Error, Result};
use crate::linalg::{exact_rank, numeric_rank};

/// Tolerance for equality of acceptance values.
pub const AND_TOL: f64 = 1e-9;

/// Multilinear polynomial `Σ_S c_S Π_{i∈S} z_i` over `n` variables.
///
/// `coeffs[s]` holds `c_S` for the set `S` whose indicator is the bit string
/// `s`, variable 1 being the most significant bit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldedPolynomial {
    pub n: usize,
    pub coeffs: Vec<f64>,
}

impl FoldedPolynomial {
    pub fn eval(&self, z: usize) -> f64 {
        // Only monomials whose variables are all set in z contribute.
        (0..self.coeffs.len()).filter(|&s| s & z == s).map(|s| self.coeffs[s]).sum()
    }

    pub fn monomials(&self, tol: f64) -> usize {
        self.coeffs.iter().filter(|c| c.abs() > tol).count()
    }

    /// Coefficient of the monomial over the given 1-based variables.
    pub fn coefficient(&self, vars: &[usize]) -> f64 {
        self.coeffs[vars.iter().map(|&i| 1usize << (self.n - i)).sum::<usize>()]
    }
}

/// In-place Möbius transform over subsets: `c_S = Σ_{T⊆S} (-1)^{|S∖T|} g(T)`.
pub fn mobius<T>(values: &mut [T])
where
    T: Copy + std::ops::SubAssign,
{
    let len = values.len();
    let mut bit = 1;
    while bit < len {
        for s in 0..len {
            if s & bit != 0 {
                let lower = values[s ^ bit];
                values[s] -= lower;
            }
        }
        bit <<= 1;
    }
}

/// Inverse of [`mobius`]: `g(S) = Σ_{T⊆S} c_T`.
pub fn zeta<T>(values: &mut [T])
where
    T: Copy + std::ops::AddAssign,
{
    let len = values.len();
    let mut bit = 1;
    while bit < len {
        for s in 0..len {
            if s & bit != 0 {
                let lower = values[s ^ bit];
                values[s] += lower;
            }
        }
        bit <<= 1;
    }
}

/// Whether `P(x, y)` depends only on `x ∧ y`.
pub fn is_and_dependent(p: &AcceptanceMatrix) -> bool {
    let d = p.dim() as u64;
    let mut seen: Vec<Option<f64>> = vec![None; d as usize];
    for x in 0..d {
        for y in 0..d {
            let v = p.get(x, y);
            match seen[(x & y) as usize] {
                Some(w) if (w - v).abs() > AND_TOL => return false,
                Some(_) => {}
                None => seen[(x & y) as usize] = Some(v),
            }
        }
    }
    true
}

/// Identifies `x` and `y`: the Möbius coefficients of `g(z) = P(z, z)`.
pub fn fold_to_polynomial(p: &AcceptanceMatrix) -> Result<FoldedPolynomial> {
    if !is_and_dependent(p) {
        return Err(Error::Precondition("acceptance matrix is not a function of x ∧ y".into()));
    }
    let mut coeffs: Vec<f64> = (0..p.dim() as u64).map(|z| p.get(z, z)).collect();
    mobius(&mut coeffs);
    Ok(FoldedPolynomial { n: p.n, coeffs })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonomialRankReport {
    pub n: usize,
    pub monomials: usize,
    pub rank: usize,
    pub exact_rank: Option<usize>,
    pub ok: bool,
}

/// Compares the monomial count of the folded polynomial with the rank of `P`.
pub fn monomial_rank_audit(p: &AcceptanceMatrix, tol: f64) -> Result<MonomialRankReport> {
    let poly = fold_to_polynomial(p)?;
    let monomials = poly.monomials(tol);
    let rank = numeric_rank(&p.to_cmatrix(), tol)?;
    let exact_rank = p.exact_rank();
    let ok = monomials == rank && exact_rank.is_none_or(|r| r == rank);
    Ok(MonomialRankReport { n: p.n, monomials, rank, exact_rank, ok })
}

/// Integer version: `g` on `{0,1}^n`, lifted to `g(x ∧ y)`. Returns the number
/// of nonzero Möbius coefficients and the exact rank of the lifted matrix.
pub fn integer_monomial_rank(n: usize, g: &[i64]) -> (usize, usize) {
    let d = 1usize << n;
    assert_eq!(g.len(), d, "table must cover the cube");
    let mut c = g.to_vec();
    mobius(&mut c);
    let monomials = c.iter().filter(|&&v| v != 0).count();
    let lifted: Vec<Vec<i64>> = (0..d).map(|x| (0..d).map(|y| g[x & y]).collect()).collect();
    (monomials, exact_rank(&lifted))
}

/// Random table with values in `{0, 1/8, ..., 1}` lifted to `P(x, y) = g(x ∧ y)`.
pub fn random_and_dependent(n: usize, rng: &mut impl Rng) -> Result<(Vec<i64>, AcceptanceMatrix)> {
    let g: Vec<i64> = (0..1usize << n).map(|_| rng.random_range(0..=8)).collect();
    let m = AcceptanceMatrix::from_fn(n, |x, y| g[(x & y) as usize] as f64 / 8.0)?;
    Ok((g, m))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NorApproxReport {
    pub n: usize,
    pub ok: bool,
    pub max_error: f64,
    pub monomials: usize,
    /// `2^√(n/12)`, the monomial count any such polynomial needs asymptotically.
    pub predicted_monomial_bound: f64,
}

/// Whether `|p(z) - NOR(z)| ≤ eps` on the whole cube.
pub fn nor_approx_audit(poly: &FoldedPolynomial, eps: f64) -> NorApproxReport {
    let max_error =
        (0..1usize << poly.n).map(|z| (poly.eval(z) - if z == 0 { 1.0 } else { 0.0 }).abs()).fold(0.0, f64::max);
    NorApproxReport {
        n: poly.n,
        ok: max_error <= eps,
        max_error,
        monomials: poly.monomials(AND_TOL),
        predicted_monomial_bound: 2f64.powf((poly.n as f64 / 12.0).sqrt()),
    }
}

/// The exact NOR polynomial on `n` variables.
pub fn nor_polynomial(n: usize) -> FoldedPolynomial {
    let mut coeffs: Vec<f64> = (0..1usize << n).map(|z| if z == 0 { 1.0 } else { 0.0 }).collect();
    mobius(&mut coeffs);
    FoldedPolynomial { n, coeffs }
}
