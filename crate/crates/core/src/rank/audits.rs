use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{exact_rank, numeric_rank, CMatrix, C64, DEFAULT_RANK_TOL};
use crate::rng::split_rng;

/// Largest `n` accepted by the structural audits.
pub const MAX_AUDIT_BITS: usize = 8;
/// Up to this `n` every sample is also ranked exactly.
pub const EXACT_AUDIT_BITS: usize = 5;

/// Outcome of a sampled full-rank audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FullRankReport {
    pub audit: String,
    pub n: usize,
    pub trials: usize,
    /// Samples at full rank `2^n`, by both numeric and (when run) exact rank.
    pub full_rank: usize,
    /// Structural check of the ordering, where the audit has one.
    pub structure_ok: bool,
    /// `(trial, numeric rank, exact rank)` for each deficient sample.
    pub failures: Vec<(usize, usize, Option<usize>)>,
    pub ok: bool,
}

fn check_bits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_AUDIT_BITS {
        return Err(Error::InvalidArgument(format!("audit needs 1 <= n <= {MAX_AUDIT_BITS}")));
    }
    Ok(())
}

/// A nonzero integer in `[-9, 9]`.
fn nonzero_entry(rng: &mut impl Rng) -> i64 {
    let v = rng.random_range(1..=9);
    if rng.random::<bool>() {
        v
    } else {
        -v
    }
}

fn sampled_audit(
    audit: &str,
    n: usize,
    trials: usize,
    seed: u64,
    structure_ok: bool,
    pattern: impl Fn(usize, usize) -> bool + Sync,
) -> Result<FullRankReport> {
    let d = 1usize << n;
    let results: Vec<Result<(usize, Option<usize>)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = split_rng(seed, t as u64);
            let ints: Vec<Vec<i64>> = (0..d)
                .map(|r| (0..d).map(|c| if pattern(r, c) { nonzero_entry(&mut rng) } else { 0 }).collect())
                .collect();
            let m = CMatrix::from_fn(d, d, |r, c| C64::new(ints[r][c] as f64, 0.0));
            let numeric = numeric_rank(&m, DEFAULT_RANK_TOL)?;
            let exact = (n <= EXACT_AUDIT_BITS).then(|| exact_rank(&ints));
            Ok((numeric, exact))
        })
        .collect();
    let mut failures = Vec::new();
    for (t, r) in results.into_iter().enumerate() {
        let (numeric, exact) = r?;
        if numeric != d || exact.is_some_and(|e| e != d) {
            failures.push((t, numeric, exact));
        }
    }
    let full_rank = trials - failures.len();
    Ok(FullRankReport {
        audit: audit.into(),
        n,
        trials,
        full_rank,
        structure_ok,
        ok: structure_ok && failures.is_empty(),
        failures,
    })
}

/// Random matrices with nonzero diagonal and zero off-diagonal all have rank `2^n`.
pub fn eq_fullrank_audit(n: usize, trials: usize, seed: u64) -> Result<FullRankReport> {
    check_bits(n)?;
    sampled_audit("eq-fullrank", n, trials, seed, true, |x, y| x == y)
}

/// Rows ordered by Hamming weight then value: a linear extension of subset order.
pub fn subset_order(n: usize) -> Vec<usize> {
    let mut xs: Vec<usize> = (0..1usize << n).collect();
    xs.sort_by_key(|&x| (x.count_ones(), x));
    xs
}

/// With rows in [`subset_order`] and column `k` holding the complement of row
/// `k`'s input, a disjointness-patterned matrix is upper triangular with a
/// nonzero diagonal.
pub fn disj_triangular_audit(n: usize, trials: usize, seed: u64) -> Result<FullRankReport> {
    check_bits(n)?;
    let d = 1usize << n;
    let order = subset_order(n);
    let full = d - 1;
    // entry (r, c) of the reordered matrix is DISJ(order[r], !order[c])
    let reordered = |r: usize, c: usize| order[r] & (full & !order[c]) == 0;
    let diagonal_ok = (0..d).all(|k| reordered(k, k));
    let lower_zero = (0..d).all(|r| (0..r).all(|c| !reordered(r, c)));
    sampled_audit("disj-triangular", n, trials, seed, diagonal_ok && lower_zero, reordered)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eq_audits_are_full_rank() {
        for (n, trials) in [(1, 10), (3, 100), (4, 100)] {
            let r = eq_fullrank_audit(n, trials, 17).unwrap();
            assert!(r.ok, "{r:?}");
            assert_eq!(r.full_rank, trials);
        }
    }

    #[test]
    fn disj_ordering_for_two_bits() {
        assert_eq!(subset_order(2), vec![0b00, 0b01, 0b10, 0b11]);
        // Columns are the complements 11, 10, 01, 00. Row 01 meets column 10
        // and column 00 only: entries (1,1) and (1,3), above the diagonal.
        let order = subset_order(2);
        let row1: Vec<bool> = (0..4).map(|c| order[1] & (3 & !order[c]) == 0).collect();
        assert_eq!(row1, vec![false, true, false, true]);
        let r = disj_triangular_audit(2, 20, 3).unwrap();
        assert!(r.ok && r.structure_ok);
    }

    #[test]
    fn disj_audits_are_full_rank() {
        for n in [1, 4] {
            let r = disj_triangular_audit(n, 100, 5).unwrap();
            assert!(r.ok, "{r:?}");
        }
    }

    #[test]
    fn out_of_range_sizes() {
        assert!(eq_fullrank_audit(0, 1, 0).is_err());
        assert!(disj_triangular_audit(9, 1, 0).is_err());
    }
}
