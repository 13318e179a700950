use rand::Rng;
use rand_distr::StandardNormal;

use super::{CMatrix, C64};

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_complex_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Haar-distributed unitary from Gram-Schmidt QR of a complex Gaussian matrix.
///
/// Gram-Schmidt yields the QR factor with positive real `R` diagonal, which is
/// the normalization that makes `Q` Haar distributed.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = random_complex_matrix(rng, dim, dim);
    let mut cols: Vec<Vec<C64>> = (0..dim).map(|c| (0..dim).map(|r| g[(r, c)]).collect()).collect();
    for j in 0..dim {
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for i in 0..j {
                let proj: C64 = cols[i].iter().zip(&cols[j]).map(|(q, v)| q.conj() * v).sum();
                let (done, rest) = cols.split_at_mut(j);
                for (v, q) in rest[0].iter_mut().zip(&done[i]) {
                    *v -= proj * q;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            cols[j].iter_mut().for_each(|z| *z /= norm);
        }
    }
    CMatrix::from_fn(dim, dim, |r, c| cols[c][r])
}
