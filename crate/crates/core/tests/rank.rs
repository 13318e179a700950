use qcomm_core::engine::{acceptance_matrix, rank_bound_audit, Party, Protocol, ProtocolStep, RegisterLayout};
use qcomm_core::linalg::exact_rank;
use qcomm_core::rank::{
    accepting_families, build_comm_matrix, canonical, check_hypothesis, disj_triangular_audit, eq_fullrank_audit,
    fold_to_polynomial, integer_monomial_rank, lemma2_scalarize, monomial_rank_audit, nor_approx_audit,
    predicted_failure, protocol_to_witness, random_and_dependent, scalarize_once, verify_ndet_witness, CommMatrix,
    FunctionName, DEFAULT_COEFF_BITS,
};
use qcomm_core::rng::split_rng;
use qcomm_core::zoo::{ndet_svd_protocol, noisy_exact_protocol, trivial_exact_protocol};

#[test]
fn communication_matrices_have_the_expected_ones() {
    for n in 1..=4 {
        let d = 1usize << n;
        let three_n = 3usize.pow(n as u32);
        assert_eq!(build_comm_matrix(FunctionName::Eq, n).unwrap().ones(), d);
        assert_eq!(build_comm_matrix(FunctionName::Neq, n).unwrap().ones(), d * d - d);
        assert_eq!(build_comm_matrix(FunctionName::Disj, n).unwrap().ones(), three_n);
        assert_eq!(build_comm_matrix(FunctionName::Int, n).unwrap().ones(), d * d - three_n);
    }
}

#[test]
fn canonical_witnesses_have_exact_patterns_and_ranks() {
    for n in 1..=4 {
        let d = 1usize << n;
        for (name, rank) in
            [(FunctionName::Eq, d), (FunctionName::Neq, 2), (FunctionName::Disj, d), (FunctionName::Int, n)]
        {
            let w = verify_ndet_witness(
                &canonical::for_function(name, n).unwrap(),
                &build_comm_matrix(name, n).unwrap(),
                1e-9,
            )
            .unwrap();
            assert_eq!(w.rank, rank, "{name}_{n}");
            assert_eq!(w.exact_rank(), Some(rank));
        }
    }
    // A wrong pattern is rejected.
    let eq = build_comm_matrix(FunctionName::Eq, 2).unwrap();
    assert!(verify_ndet_witness(&canonical::difference(2), &eq, 1e-9).is_err());
}

#[test]
fn sampled_full_rank_audits() {
    for n in 1..=4 {
        let r = eq_fullrank_audit(n, 20, 3).unwrap();
        assert!(r.ok && r.full_rank == 20, "{r:?}");
        let r = disj_triangular_audit(n, 20, 3).unwrap();
        assert!(r.ok && r.structure_ok && r.full_rank == 20, "{r:?}");
    }
}

#[test]
fn neq2_families_give_a_low_rank_witness() {
    let b = ndet_svd_protocol(&canonical::difference(2)).unwrap();
    let target = build_comm_matrix(FunctionName::Neq, 2).unwrap();
    let s = protocol_to_witness(&b.protocol, &target, 0).unwrap();
    let ell = b.protocol.declared_cost();
    assert_eq!(ell, 2);
    assert!(s.witness.rank <= 1 << (ell - 1));
    assert!(s.trial.m <= 1 << (ell - 1));
}

#[test]
fn scalarization_success_rate() {
    let b = ndet_svd_protocol(&canonical::difference(2)).unwrap();
    let target = build_comm_matrix(FunctionName::Neq, 2).unwrap();
    let (a, fam_b) = accepting_families(&b.protocol).unwrap();
    check_hypothesis(&a, &fam_b, &target).unwrap();
    let successes = (0..1000u64)
        .filter(|&k| {
            let mut rng = split_rng(77, k);
            scalarize_once(&a, &fam_b, &target, DEFAULT_COEFF_BITS, &mut rng).unwrap().success
        })
        .count();
    let predicted = 1.0 - predicted_failure(&target, DEFAULT_COEFF_BITS);
    println!("scalarization: {successes}/1000 (predicted success ≥ {predicted:.9})");
    assert!(successes >= 999);
}

#[test]
fn witnesses_from_protocols() {
    let eq2 = build_comm_matrix(FunctionName::Eq, 2).unwrap();
    let trivial = trivial_exact_protocol(&eq2).unwrap();
    let s = protocol_to_witness(&trivial, &eq2, 1).unwrap();
    assert!(s.witness.rank <= 1 << (trivial.declared_cost() - 1));

    let int4 = build_comm_matrix(FunctionName::Int, 4).unwrap();
    let b = ndet_svd_protocol(&canonical::common_ones(4)).unwrap();
    let s = protocol_to_witness(&b.protocol, &int4, 2).unwrap();
    assert!(s.witness.rank <= 1 << (b.protocol.declared_cost() - 1));
    assert!(s.witness.rank >= 4);

    assert!(protocol_to_witness(&trivial, &int4, 0).is_err());
    let eq2_as_neq = build_comm_matrix(FunctionName::Neq, 2).unwrap();
    assert!(protocol_to_witness(&trivial, &eq2_as_neq, 0).is_err());
}

#[test]
fn one_qubit_always_accept_protocol() {
    let step = ProtocolStep::new(Party::Alice, vec![0], |_| {
        Ok(vec![qcomm_core::engine::Gate::x(qcomm_core::engine::Qubit::Channel(0))])
    });
    let p = Protocol::new("always", RegisterLayout::new(0, 1, 0).unwrap(), 1, vec![step]).unwrap();
    assert_eq!(p.declared_cost(), 1);
    let ones = CommMatrix::from_fn(1, |_, _| true).unwrap();
    let s = protocol_to_witness(&p, &ones, 0).unwrap();
    assert_eq!(s.witness.rank, 1);
    assert!(rank_bound_audit(&p, 1e-9).unwrap().ok);
}

#[test]
fn lemma2_rejects_families_off_the_pattern() {
    let eq1 = build_comm_matrix(FunctionName::Eq, 1).unwrap();
    let e = |x| qcomm_core::linalg::CVector::basis(2, x);
    let fam = vec![vec![e(0), e(1)]];
    assert!(lemma2_scalarize(&fam, &fam.clone(), &eq1, 24, 0).is_err());
}

#[test]
fn monomials_equal_rank_on_random_and_dependent_matrices() {
    for n in 2..=5 {
        let mut rng = split_rng(8, n as u64);
        for _ in 0..50 {
            let (g, p) = random_and_dependent(n, &mut rng).unwrap();
            let (monomials, rank) = integer_monomial_rank(n, &g);
            assert_eq!(monomials, rank);
            let r = monomial_rank_audit(&p, 1e-9).unwrap();
            assert!(r.ok && r.monomials == monomials, "{r:?}");
        }
    }
}

#[test]
fn monomial_rank_oracle_on_disjointness() {
    // g = [z = 0] has all 2^n Möbius coefficients ±1.
    for n in 1..=5 {
        let g: Vec<i64> = (0..1usize << n).map(|z| (z == 0) as i64).collect();
        let lifted: Vec<Vec<i64>> = (0..1usize << n).map(|x| (0..1usize << n).map(|y| g[x & y]).collect()).collect();
        assert_eq!(integer_monomial_rank(n, &g), (1 << n, exact_rank(&lifted)));
    }
}

#[test]
fn noisy_disjointness_folds_to_a_nor_approximation() {
    for n in 1..=4 {
        let p = noisy_exact_protocol(&build_comm_matrix(FunctionName::Disj, n).unwrap(), 0.2).unwrap();
        let m = acceptance_matrix(&p).unwrap();
        let poly = fold_to_polynomial(&m).unwrap();
        let r = nor_approx_audit(&poly, 1.0 / 3.0);
        println!(
            "n={n}: max error {:.3}, monomials {}, 2^sqrt(n/12) = {:.3}",
            r.max_error, r.monomials, r.predicted_monomial_bound
        );
        assert!(r.ok);
        assert!((r.max_error - 0.2).abs() < 1e-9);
    }
}
