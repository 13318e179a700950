//! Communication matrices, non-deterministic rank witnesses and the
//! polynomial tools for acceptance matrices that depend only on `x ∧ y`.

mod audits;
mod comm;
mod lemma2;
mod poly;
mod witness;

pub use audits::{
    disj_triangular_audit, eq_fullrank_audit, subset_order, FullRankReport, EXACT_AUDIT_BITS, MAX_AUDIT_BITS,
};
pub use comm::{build_comm_matrix, CommMatrix, FunctionName, MAX_COMM_BITS};
pub use lemma2::{
    accepting_families, check_hypothesis, lemma2_scalarize, lemma2_scalarize_with_budget, predicted_failure,
    protocol_to_witness, scalarize_once, tensor_sum_norms, Scalarization, ScalarizationTrial, VectorFamily,
    DEFAULT_COEFF_BITS, SCALARIZE_ATTEMPTS, ZERO_TOL,
};
pub use poly::{
    fold_to_polynomial, integer_monomial_rank, is_and_dependent, mobius, monomial_rank_audit, nor_approx_audit,
    nor_polynomial, random_and_dependent, zeta, FoldedPolynomial, MonomialRankReport, NorApproxReport, AND_TOL,
};
pub use witness::{
    canonical, pattern_counterexamples, verify_ndet_witness, witness_report, NdetWitness, WitnessReport,
};
