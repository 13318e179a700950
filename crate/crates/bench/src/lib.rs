//! Shared inputs for the benchmark suite.

use qcomm_core::linalg::{random_complex_matrix, CMatrix};
use qcomm_core::rng::split_rng;

/// A seeded dense complex matrix of size `dim x dim`.
pub fn bench_matrix(dim: usize, seed: u64) -> CMatrix {
    random_complex_matrix(&mut split_rng(seed, dim as u64), dim, dim)
}

/// Bit vectors of length `n` sharing exactly one set position, at `n / 2`.
pub fn single_overlap(n: usize) -> (Vec<bool>, Vec<bool>) {
    let mut x = vec![false; n];
    let mut y = vec![false; n];
    for i in 0..n {
        x[i] = i % 2 == 0;
        y[i] = i % 2 == 1;
    }
    x[n / 2] = true;
    y[n / 2] = true;
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_overlap_intersects_once() {
        for n in [1, 4, 9, 64] {
            let (x, y) = single_overlap(n);
            assert_eq!(x.iter().zip(&y).filter(|(a, b)| **a && **b).count(), 1);
        }
    }

    #[test]
    fn matrices_are_reproducible() {
        assert_eq!(bench_matrix(4, 1), bench_matrix(4, 1));
    }
}
