//! Exact rank of integer matrices by fraction-free (Bareiss) elimination.

use num_bigint::BigInt;
use num_traits::Zero;

/// Exact rank of an integer matrix given as rows.
pub fn exact_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(pivot) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..nrows {
            for c in col + 1..ncols {
                let v = (&m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Exact rank of a real matrix whose entries are integer multiples of `1/denominator`.
///
/// Returns `None` when some entry is not within `1e-12` of such a multiple.
pub fn exact_rank_scaled(values: &[Vec<f64>], denominator: i64) -> Option<usize> {
    let mut ints = Vec::with_capacity(values.len());
    for row in values {
        let mut out = Vec::with_capacity(row.len());
        for &v in row {
            let scaled = v * denominator as f64;
            let rounded = scaled.round();
            if (v - rounded / denominator as f64).abs() > 1e-12 || rounded.abs() > 9.0e15 {
                return None;
            }
            out.push(rounded as i64);
        }
        ints.push(out);
    }
    Some(exact_rank(&ints))
}
