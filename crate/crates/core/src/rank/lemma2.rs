use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use super::comm::CommMatrix;
use super::witness::{pattern_counterexamples, verify_ndet_witness, NdetWitness};
use crate::engine::{acceptance_matrix, yao_kremer_decompose, Protocol};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64, ZERO};
use crate::rng::split_rng;

/// Retry budget for scalarization.
pub const SCALARIZE_ATTEMPTS: usize = 32;
pub const DEFAULT_COEFF_BITS: u32 = 24;
/// Relative threshold for zero tests on vectors and scalars.
pub const ZERO_TOL: f64 = 1e-9;

/// Vectors `family[i][x]`: term `i`, input `x`.
pub type VectorFamily = Vec<Vec<CVector>>;

/// One run of the scalarization algorithm.
#[derive(Debug, Clone)]
pub struct ScalarizationTrial {
    /// Number of terms.
    pub m: usize,
    /// `|I| = 2^coeff_bits` equally spaced values in `[1, 2]`.
    pub coeff_bits: u32,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// `a_table[i][x] = Σ_j α_j A_i(x)_j`.
    pub a_table: Vec<Vec<C64>>,
    /// `b_table[i][y] = Σ_k β_k B_i(y)_k`.
    pub b_table: Vec<Vec<C64>>,
    /// `v(x, y) = Σ_i a_i(x) b_i(y)`.
    pub v_table: CMatrix,
    pub success: bool,
}

/// Final result of [`lemma2_scalarize`].
#[derive(Debug, Clone)]
pub struct Scalarization {
    pub trial: ScalarizationTrial,
    pub attempts: usize,
    pub witness: NdetWitness,
}

/// Failure bound for one attempt: `min(1, 2·ones / |I|)`.
pub fn predicted_failure(target: &CommMatrix, coeff_bits: u32) -> f64 {
    (2.0 * target.ones() as f64 / 2f64.powi(coeff_bits as i32)).min(1.0)
}

/// The element `k` of the coefficient set.
fn coefficient(k: u64, coeff_bits: u32) -> f64 {
    if coeff_bits == 0 {
        return 1.0;
    }
    let top = (1u64 << coeff_bits) - 1;
    1.0 + k as f64 / top as f64
}

fn draw(rng: &mut impl Rng, len: usize, coeff_bits: u32) -> Vec<f64> {
    (0..len).map(|_| coefficient(rng.random_range(0..1u64 << coeff_bits), coeff_bits)).collect()
}

fn dims(family: &VectorFamily, inputs: usize) -> Result<usize> {
    let d = family.first().and_then(|f| f.first()).map(CVector::dim).unwrap_or(0);
    if family.iter().any(|f| f.len() != inputs || f.iter().any(|v| v.dim() != d)) {
        return Err(Error::InvalidArgument("family vectors must share one dimension and cover every input".into()));
    }
    Ok(d)
}

/// `‖Σ_i A_i(x) ⊗ B_i(y)‖²` for every pair.
///
/// The sum is formed explicitly as the matrix `Σ_i A_i B_iᵀ`; going through
/// Gram matrices instead would lose half the digits to cancellation.
pub fn tensor_sum_norms(a: &VectorFamily, b: &VectorFamily) -> Vec<Vec<f64>> {
    let inputs = a.first().map(Vec::len).unwrap_or(0);
    let db = b.first().and_then(|f| f.first()).map(CVector::dim).unwrap_or(0);
    let support = |v: &CVector| -> Vec<(usize, C64)> {
        v.as_slice().iter().copied().enumerate().filter(|(_, z)| *z != ZERO).collect()
    };
    let sa: Vec<Vec<Vec<(usize, C64)>>> = a.iter().map(|f| f.iter().map(support).collect()).collect();
    (0..inputs)
        .into_par_iter()
        .map(|x| {
            (0..inputs)
                .map(|y| {
                    let mut acc: HashMap<usize, C64> = HashMap::new();
                    for (i, fam) in sa.iter().enumerate() {
                        for &(r, av) in &fam[x] {
                            for (c, bv) in b[i][y].as_slice().iter().enumerate() {
                                if *bv != ZERO {
                                    *acc.entry(r * db + c).or_insert(ZERO) += av * bv;
                                }
                            }
                        }
                    }
                    acc.values().map(|z| z.norm_sqr()).sum()
                })
                .collect()
        })
        .collect()
}

/// Checks `Σ_i A_i(x) ⊗ B_i(y) = 0 ⟺ f(x, y) = 0`.
pub fn check_hypothesis(a: &VectorFamily, b: &VectorFamily, target: &CommMatrix) -> Result<()> {
    let inputs = target.dim();
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidArgument("families need the same positive number of terms".into()));
    }
    dims(a, inputs)?;
    dims(b, inputs)?;
    let norms = tensor_sum_norms(a, b);
    let scale = norms.iter().flatten().fold(0.0f64, |m, &v| m.max(v)).sqrt();
    let mut bad = Vec::new();
    for (x, row) in norms.iter().enumerate() {
        for (y, &v) in row.iter().enumerate() {
            let nonzero = scale > 0.0 && v.sqrt() > ZERO_TOL * scale;
            if nonzero != target.get(x as u64, y as u64) {
                bad.push((x, y));
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("families vanish off the target pattern at {bad:?}")))
    }
}

/// One scalarization attempt with coefficients drawn from `rng`.
pub fn scalarize_once(
    a: &VectorFamily,
    b: &VectorFamily,
    target: &CommMatrix,
    coeff_bits: u32,
    rng: &mut impl Rng,
) -> Result<ScalarizationTrial> {
    let inputs = target.dim();
    let da = dims(a, inputs)?;
    let db = dims(b, inputs)?;
    let alpha = draw(rng, da, coeff_bits);
    let beta = draw(rng, db, coeff_bits);
    let project = |v: &CVector, c: &[f64]| v.as_slice().iter().zip(c).map(|(z, w)| z * w).sum::<C64>();
    let a_table: Vec<Vec<C64>> = a.iter().map(|f| f.iter().map(|v| project(v, &alpha)).collect()).collect();
    let b_table: Vec<Vec<C64>> = b.iter().map(|f| f.iter().map(|v| project(v, &beta)).collect()).collect();
    let v_table = CMatrix::from_fn(inputs, inputs, |x, y| (0..a.len()).map(|i| a_table[i][x] * b_table[i][y]).sum());
    let success = pattern_counterexamples(&v_table, target, ZERO_TOL).is_empty();
    Ok(ScalarizationTrial { m: a.len(), coeff_bits, alpha, beta, a_table, b_table, v_table, success })
}

/// Turns vector families satisfying the hypothesis into an `m`-term scalar
/// witness `v(x, y) = Σ_i a_i(x) b_i(y)` of rank at most `m`.
pub fn lemma2_scalarize(
    a: &VectorFamily,
    b: &VectorFamily,
    target: &CommMatrix,
    coeff_bits: u32,
    seed: u64,
) -> Result<Scalarization> {
    lemma2_scalarize_with_budget(a, b, target, coeff_bits, seed, SCALARIZE_ATTEMPTS)
}

pub fn lemma2_scalarize_with_budget(
    a: &VectorFamily,
    b: &VectorFamily,
    target: &CommMatrix,
    coeff_bits: u32,
    seed: u64,
    attempts: usize,
) -> Result<Scalarization> {
    if coeff_bits > 52 {
        return Err(Error::InvalidArgument("coeff_bits above 52 is not representable".into()));
    }
    check_hypothesis(a, b, target)?;
    for k in 0..attempts {
        let mut rng = split_rng(seed, k as u64);
        let trial = scalarize_once(a, b, target, coeff_bits, &mut rng)?;
        if trial.success {
            let witness = verify_ndet_witness(&trial.v_table, target, ZERO_TOL)?;
            return Ok(Scalarization { trial, attempts: k + 1, witness });
        }
    }
    Err(Error::ProbabilisticFailure { attempts })
}

/// Accepting-transcript families of a protocol: `A_i(x)` with the in-flight
/// channel content folded in and `B_i(y)`, for each transcript `i` whose
/// output bit is 1.
pub fn accepting_families(p: &Protocol) -> Result<(VectorFamily, VectorFamily)> {
    let inputs = 1u64 << p.input_bits;
    let per_x: Vec<_> = (0..inputs).map(|x| yao_kremer_decompose(p, x, 0)).collect::<Result<_>>()?;
    let per_y: Vec<_> = (0..inputs).map(|y| yao_kremer_decompose(p, 0, y)).collect::<Result<_>>()?;
    if per_x[0].out_bit_index.is_none() {
        return Err(Error::Precondition("the output qubit is not in the last message".into()));
    }
    let layout = p.layout;
    let accepting: Vec<usize> =
        per_x[0].terms.iter().enumerate().filter(|(_, t)| t.output_bit(&layout)).map(|(i, _)| i).collect();
    let a = accepting.iter().map(|&i| per_x.iter().map(|d| d.terms[i].alice_with_channel()).collect()).collect();
    let b = accepting.iter().map(|&i| per_y.iter().map(|d| d.terms[i].bob.clone()).collect()).collect();
    Ok((a, b))
}

/// A witness of rank at most `|S| = 2^(ℓ-1)` extracted from a protocol that
/// computes `target` non-deterministically.
pub fn protocol_to_witness(p: &Protocol, target: &CommMatrix, seed: u64) -> Result<Scalarization> {
    if p.input_bits != target.n {
        return Err(Error::InvalidArgument("protocol and target sizes differ".into()));
    }
    let acc = acceptance_matrix(p)?;
    let pattern_ok = (0..target.dim() as u64)
        .all(|x| (0..target.dim() as u64).all(|y| (acc.get(x, y) > ZERO_TOL) == target.get(x, y)));
    if !pattern_ok {
        return Err(Error::Precondition(format!("{} does not accept exactly on the target's 1-set", p.name)));
    }
    let (a, b) = accepting_families(p)?;
    lemma2_scalarize(&a, &b, target, DEFAULT_COEFF_BITS, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::{build_comm_matrix, FunctionName};

    fn eq1_family() -> (VectorFamily, VectorFamily) {
        let e = |x: usize| CVector::basis(2, x);
        (vec![vec![e(0), e(1)]], vec![vec![e(0), e(1)]])
    }

    #[test]
    fn eq1_basis_family_violates_the_hypothesis() {
        // e_x ⊗ e_y never vanishes, yet EQ_1(0,1) = 0.
        let (a, b) = eq1_family();
        let eq1 = build_comm_matrix(FunctionName::Eq, 1).unwrap();
        assert!(matches!(lemma2_scalarize(&a, &b, &eq1, 24, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn two_term_family_gives_eq_witness() {
        // A_i(x) = [x = i], B_i(y) = [y = i]: the sum vanishes exactly off the diagonal.
        let ind = |i: usize, x: usize| CVector::from_real(&[if i == x { 1.0 } else { 0.0 }]);
        let a: VectorFamily = (0..2).map(|i| (0..2).map(|x| ind(i, x)).collect()).collect();
        let eq1 = build_comm_matrix(FunctionName::Eq, 1).unwrap();
        let s = lemma2_scalarize(&a, &a.clone(), &eq1, 24, 9).unwrap();
        assert_eq!(s.witness.rank, 2);
        assert_eq!(s.trial.m, 2);
        for (i, row) in s.trial.a_table.iter().enumerate() {
            for (x, v) in row.iter().enumerate() {
                let want: C64 = a[i][x].as_slice().iter().zip(&s.trial.alpha).map(|(z, w)| z * w).sum();
                assert_eq!(*v, want);
            }
        }
    }

    #[test]
    fn coefficients_are_nonzero_and_in_range() {
        let mut rng = split_rng(1, 0);
        for bits in [0u32, 1, 8, 24] {
            for c in draw(&mut rng, 100, bits) {
                assert!((1.0..=2.0).contains(&c));
            }
        }
        assert_eq!(coefficient(0, 2), 1.0);
        assert_eq!(coefficient(3, 2), 2.0);
    }

    #[test]
    fn tiny_coefficient_set_can_fail() {
        // With |I| = 1 and a family whose single-coefficient projection cancels.
        let a: VectorFamily = vec![vec![CVector::from_real(&[1.0, -1.0]), CVector::from_real(&[1.0, -1.0])]];
        let b: VectorFamily = vec![vec![CVector::from_real(&[1.0]), CVector::from_real(&[1.0])]];
        let ones = CommMatrix::from_fn(1, |_, _| true).unwrap();
        assert!(matches!(
            lemma2_scalarize_with_budget(&a, &b, &ones, 0, 0, 4),
            Err(Error::ProbabilisticFailure { attempts: 4 })
        ));
        assert!(lemma2_scalarize(&a, &b, &ones, 24, 0).is_ok());
    }
}
