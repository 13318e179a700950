//! Concrete protocols: trivial exact, SVD-based non-deterministic, amplitude
//! amplification and the two intersection protocols.

mod corpus;
mod cost;
mod intersect;
mod ndet;
mod oracle;
mod qsearch;
mod trivial;

pub use corpus::{corpus, NAMED_FUNCTIONS};
pub use cost::{base_cost, cost_model, fit_cost_model, log_star, CostFit};
pub use intersect::{
    bcw_config, bcw_intersection, bcw_worst_cost, coherent_cost, parse_bits, recursive_intersection, verification_cost,
    BlockRule, IntersectOutcome, RecursionConfig,
};
pub use ndet::{ndet_report, ndet_svd_protocol, NdetProtocolBundle, NdetReport, PATTERN_TOL};
pub use oracle::{block_bit, distributed_and_oracle, oracle_cost};
pub use qsearch::{
    amplified_probability, amplify, default_budget, good_probability, qsearch, qsearch_success_probability,
    uniform_prepare, QSearchConfig, Schedule, SearchOutcome, BUDGET_FACTOR,
};
pub use trivial::{noisy_exact_protocol, trivial_exact_protocol};
