use serde::Serialize;

use super::matrix::acceptance_matrix;
use super::protocol::Protocol;
use crate::error::Result;
use crate::linalg::numeric_rank;

/// Rank of a protocol's acceptance matrix against the `2^(2ℓ-2)` ceiling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankBoundReport {
    pub protocol: String,
    pub ell: usize,
    pub rank: usize,
    /// Exact rank, when all entries are dyadic rationals.
    pub exact_rank: Option<usize>,
    pub bound: usize,
    pub ok: bool,
}

/// `floor(2^(2ℓ-2))`; zero for a silent protocol.
pub fn rank_ceiling(ell: usize) -> usize {
    (1usize << (2 * ell)) >> 2
}

pub fn rank_bound_audit(p: &Protocol, tol: f64) -> Result<RankBoundReport> {
    let m = acceptance_matrix(p)?;
    let rank = numeric_rank(&m.to_cmatrix(), tol)?;
    let exact_rank = m.exact_rank();
    let ell = p.declared_cost();
    let bound = rank_ceiling(ell);
    let ok = rank <= bound && exact_rank.is_none_or(|r| r == rank && r <= bound);
    Ok(RankBoundReport { protocol: p.name.clone(), ell, rank, exact_rank, bound, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Gate, Party, ProtocolStep, Qubit, RegisterLayout};

    #[test]
    fn ceiling_values() {
        assert_eq!(rank_ceiling(0), 0);
        assert_eq!(rank_ceiling(1), 1);
        assert_eq!(rank_ceiling(2), 4);
        assert_eq!(rank_ceiling(3), 16);
    }

    #[test]
    fn one_qubit_protocols_have_rank_one() {
        for flip in [false, true] {
            let step = ProtocolStep::new(Party::Alice, vec![0], move |_| {
                Ok(if flip { vec![Gate::x(Qubit::Channel(0))] } else { vec![] })
            });
            let p = Protocol::new("one", RegisterLayout::new(0, 1, 0).unwrap(), 2, vec![step]).unwrap();
            let r = rank_bound_audit(&p, 1e-9).unwrap();
            assert_eq!(r.bound, 1);
            assert!(r.rank <= 1 && r.ok);
            assert_eq!(r.exact_rank, Some(r.rank));
        }
    }
}
