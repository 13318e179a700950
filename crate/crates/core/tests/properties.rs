use proptest::prelude::*;
use qcomm_core::engine::acceptance_matrix;
use qcomm_core::linalg::{apply_on_qubits, exact_rank, numeric_rank, random_unitary, svd, CMatrix, CVector, C64};
use qcomm_core::rank::{mobius, zeta};
use qcomm_core::zoo::{
    bcw_config, bcw_intersection, ndet_svd_protocol, qsearch, uniform_prepare, QSearchConfig, PATTERN_TOL,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complex_matrix(max_dim: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
        proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64), r * c)
            .prop_map(move |v| CMatrix::new(r, c, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap())
    })
}

fn int_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=6usize, 1..=6usize)
        .prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-3i64..=3, c), r))
}

proptest! {
    #[test]
    fn svd_round_trip(m in complex_matrix(8)) {
        let s = svd(&m).unwrap();
        let scale = m.frobenius_norm().max(1.0);
        prop_assert!(s.reconstruct().max_abs_diff(&m) <= 1e-8 * scale);
        prop_assert!(s.u.is_unitary(1e-9) && s.v.is_unitary(1e-9));
        prop_assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn numeric_rank_matches_exact_rank(rows in int_matrix()) {
        let m = CMatrix::from_fn(rows.len(), rows[0].len(), |r, c| C64::new(rows[r][c] as f64, 0.0));
        prop_assert_eq!(numeric_rank(&m, 1e-9).unwrap(), exact_rank(&rows));
    }

    #[test]
    fn low_rank_products(seed in any::<u64>(), k in 1..4usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = qcomm_core::linalg::random_complex_matrix(&mut rng, 8, k);
        let b = qcomm_core::linalg::random_complex_matrix(&mut rng, k, 8);
        prop_assert_eq!(numeric_rank(&a.matmul(&b).unwrap(), 1e-9).unwrap(), k);
    }

    #[test]
    fn unitaries_preserve_norm(seed in any::<u64>(), q in 1..=3usize, extra in 0..=3usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total = q + extra;
        let u = random_unitary(&mut rng, 1 << q);
        let v = qcomm_core::linalg::random_complex_matrix(&mut rng, 1 << total, 1).column(0);
        let mut targets: Vec<usize> = (0..total).collect();
        rand::seq::SliceRandom::shuffle(targets.as_mut_slice(), &mut rng);
        targets.truncate(q);
        let out = apply_on_qubits(&v, &u, &targets).unwrap();
        prop_assert!((out.norm() - v.norm()).abs() <= 1e-10 * v.norm().max(1.0));
    }

    #[test]
    fn mobius_and_zeta_are_inverse(values in proptest::collection::vec(-100i64..100, 1..=6).prop_flat_map(|v| {
        let n = v.len();
        proptest::collection::vec(-100i64..100, 1 << n)
    })) {
        let mut c = values.clone();
        mobius(&mut c);
        zeta(&mut c);
        prop_assert_eq!(&c, &values);
        zeta(&mut c);
        mobius(&mut c);
        prop_assert_eq!(c, values);
    }

    #[test]
    fn svd_protocol_accepts_on_the_support(n in 1..=3usize, seed in any::<u64>(), density in 0.0..1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 1 << n;
        let dense = qcomm_core::linalg::random_complex_matrix(&mut rng, d, d);
        let mask: Vec<bool> = (0..d * d).map(|_| rand::Rng::random_bool(&mut rng, density)).collect();
        let m = CMatrix::from_fn(d, d, |x, y| if mask[x * d + y] { dense[(x, y)] } else { C64::new(0.0, 0.0) });
        let b = ndet_svd_protocol(&m).unwrap();
        let p = acceptance_matrix(&b.protocol).unwrap();
        for x in 0..d {
            for y in 0..d {
                prop_assert_eq!(p.get(x as u64, y as u64) > PATTERN_TOL, mask[x * d + y]);
            }
        }
    }

    #[test]
    fn qsearch_never_reports_a_bad_index(n in 1..=64usize, good in proptest::collection::vec(any::<bool>(), 64), seed in any::<u64>()) {
        let a = uniform_prepare(n);
        let pred = |i: usize| good[i];
        let out = qsearch(&a, &pred, &QSearchConfig::for_space(n, seed)).unwrap();
        match out.found {
            Some(i) => prop_assert!(good[i]),
            None => prop_assert!(out.applications <= QSearchConfig::for_space(n, seed).max_applications),
        }
    }

    #[test]
    fn bcw_is_one_sided(x in proptest::collection::vec(any::<bool>(), 1..=16), mask in proptest::collection::vec(any::<bool>(), 16), seed in any::<u64>()) {
        let y: Vec<bool> = mask[..x.len()].to_vec();
        let out = bcw_intersection(&x, &y, &bcw_config(x.len(), seed)).unwrap();
        if let Some(i) = out.found {
            prop_assert!(x[i] && y[i]);
        }
        if x.iter().zip(&y).all(|(a, b)| !(a & b)) {
            prop_assert!(out.found.is_none());
        }
    }
}

#[test]
fn state_vector_helpers_agree() {
    let v = CVector::basis(4, 1);
    let x = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
    assert_eq!(apply_on_qubits(&v, &x, &[1]).unwrap(), CVector::basis(4, 0));
    assert_eq!(apply_on_qubits(&v, &x, &[0]).unwrap(), CVector::basis(4, 3));
}
