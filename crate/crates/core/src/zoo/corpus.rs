use super::ndet::ndet_svd_protocol;
use super::oracle::distributed_and_oracle;
use super::trivial::{noisy_exact_protocol, trivial_exact_protocol};
use crate::engine::Protocol;
use crate::error::Result;
use crate::rank::{build_comm_matrix, canonical, FunctionName};

pub const NAMED_FUNCTIONS: [FunctionName; 4] =
    [FunctionName::Eq, FunctionName::Neq, FunctionName::Disj, FunctionName::Int];

/// Reference protocols on `n`-bit inputs: trivial and SVD protocols for each
/// named function, a noisy disjointness protocol, and the AND gadget on an
/// `n`-index block.
pub fn corpus(n: usize) -> Result<Vec<Protocol>> {
    let mut out = Vec::new();
    for name in NAMED_FUNCTIONS {
        let f = build_comm_matrix(name, n)?;
        out.push(trivial_exact_protocol(&f)?);
        let mut svd = ndet_svd_protocol(&canonical::for_function(name, n)?)?.protocol;
        svd.name = format!("ndet-svd-{name}{n}");
        out.push(svd);
    }
    out.push(noisy_exact_protocol(&build_comm_matrix(FunctionName::Disj, n)?, 0.2)?);
    out.push(distributed_and_oracle(n)?);
    Ok(out)
}
