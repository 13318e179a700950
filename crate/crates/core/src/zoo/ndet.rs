use std::sync::Arc;

use serde::Serialize;

use crate::engine::DEFAULT_MAX_TABULATED_BITS;
use crate::engine::{
    acceptance_matrix_with_limit, Gate, Party, Protocol, ProtocolStep, Qubit, RegisterLayout, Unitary,
};
use crate::error::{Error, Result};
use crate::linalg::{ceil_log2, qubit_count, svd, unitary_with_first_column, CMatrix, CVector, C64, DEFAULT_RANK_TOL};
use crate::rank::{build_comm_matrix, canonical, FunctionName};

/// Relative threshold below which an entry or a row counts as zero.
pub const PATTERN_TOL: f64 = 1e-9;

/// The one-round non-deterministic protocol built from a matrix `M`, with the
/// data needed to predict its acceptance probabilities.
#[derive(Debug, Clone)]
pub struct NdetProtocolBundle {
    pub protocol: Protocol,
    pub source_matrix: CMatrix,
    /// Rank of `M` (number of singular values kept).
    pub r: usize,
    /// `c_x = 1/‖row x‖`, or 0 on an all-zero row.
    pub per_row_norm: Vec<f64>,
    /// Whether a flag qubit marks all-zero rows.
    pub dead_flag: bool,
}

impl NdetProtocolBundle {
    /// `c_x² |M_xy|²`.
    pub fn predicted_acceptance(&self, x: u64, y: u64) -> f64 {
        let c = self.per_row_norm[x as usize];
        c * c * self.source_matrix[(x as usize, y as usize)].norm_sqr()
    }
}

/// Builds the protocol in which Alice sends the compressed state
/// `c_x Σ V |x⟩` (with `Mᵀ = UΣV`) and Bob applies `U` and accepts on `|y⟩`.
///
/// Costs `⌈log₂ r⌉ + 1` qubits, plus one flag qubit when `M` has an all-zero
/// row. An all-zero `M` gives the silent protocol that never accepts.
pub fn ndet_svd_protocol(m: &CMatrix) -> Result<NdetProtocolBundle> {
    let n = match qubit_count(m.rows()) {
        Some(n) if m.is_square() => n,
        _ => return Err(Error::InvalidArgument("matrix must be 2^n x 2^n".into())),
    };
    let dim = m.rows();
    let scale = m.max_abs();
    if scale == 0.0 {
        let protocol = Protocol::new("ndet-svd-zero", RegisterLayout::new(0, 1, 0)?, n, vec![])?;
        return Ok(NdetProtocolBundle {
            protocol,
            source_matrix: m.clone(),
            r: 0,
            per_row_norm: vec![0.0; dim],
            dead_flag: false,
        });
    }

    let dec = svd(&m.transpose())?;
    let r = dec.rank(DEFAULT_RANK_TOL);
    let q = ceil_log2(r);

    let row_norms: Vec<f64> = (0..dim).map(|x| m.row(x).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()).collect();
    let dead: Vec<bool> = row_norms.iter().map(|&v| v <= PATTERN_TOL * scale).collect();
    let dead_flag = dead.iter().any(|&d| d);

    // Alice's state preparations, one per live row.
    let mut preps: Vec<Option<Unitary>> = Vec::with_capacity(dim);
    let mut per_row_norm = vec![0.0; dim];
    for x in 0..dim {
        if dead[x] {
            preps.push(None);
            continue;
        }
        let mut phi = CVector::zeros(1 << q);
        for k in 0..r {
            phi[k] = dec.v[(k, x)] * dec.sigma[k];
        }
        let norm = phi.norm();
        per_row_norm[x] = 1.0 / norm;
        let phi = phi.scale(C64::new(1.0 / norm, 0.0));
        preps.push(Some(Unitary::new(unitary_with_first_column(&phi)?)?));
    }
    let preps = Arc::new(preps);
    let bob_u = Unitary::new(dec.u.clone())?;

    let flag = dead_flag.then_some(q + 1);
    let channel = 1 + q + usize::from(dead_flag);
    let layout = RegisterLayout::new(0, channel, n)?;
    let mut alice_window: Vec<usize> = (1..=q).collect();
    alice_window.extend(flag);

    let alice = ProtocolStep::new(Party::Alice, alice_window, move |x| {
        let mut gates = Vec::new();
        match (&preps[x as usize], flag) {
            (Some(u), _) if q > 0 => gates.push(Gate::dense((1..=q).map(Qubit::Channel).collect(), u.clone())?),
            (Some(_), _) => {}
            (None, Some(f)) => gates.push(Gate::x(Qubit::Channel(f))),
            (None, None) => unreachable!("dead rows always carry a flag"),
        }
        Ok(gates)
    });

    let bob = ProtocolStep::new(Party::Bob, vec![0], move |y| {
        let mut gates = Vec::new();
        // The message lands in the low q qubits of Bob's register.
        for k in 0..q {
            gates.push(Gate::swap(Qubit::Channel(1 + k), Qubit::Bob(n - q + k)));
        }
        gates.push(Gate::dense((0..n).map(Qubit::Bob).collect(), bob_u.clone())?);
        let mut targets: Vec<Qubit> = (0..n).map(Qubit::Bob).collect();
        targets.extend(flag.map(Qubit::Channel));
        targets.push(Qubit::Channel(0));
        let y = y as usize;
        let shift = 1 + usize::from(flag.is_some());
        gates.push(Gate::classical_fn(targets, move |l| {
            let live = flag.is_none() || l >> 1 & 1 == 0;
            l ^ usize::from(live && l >> shift == y)
        })?);
        Ok(gates)
    });

    let protocol = Protocol::new(format!("ndet-svd-r{r}"), layout, n, vec![alice, bob])?;
    Ok(NdetProtocolBundle { protocol, source_matrix: m.clone(), r, per_row_norm, dead_flag })
}

/// Summary of the SVD protocol built from a function's canonical witness.
#[derive(Debug, Clone, Serialize)]
pub struct NdetReport {
    pub function: String,
    pub n: usize,
    pub rank: usize,
    pub cost: usize,
    pub dead_flag: bool,
    /// Whether the acceptance zero-pattern is exactly the function's 1-set.
    pub pattern_ok: bool,
    pub counterexamples: Vec<(u64, u64)>,
    /// Largest gap between simulated and predicted acceptance.
    pub max_prediction_error: f64,
}

pub fn ndet_report(name: FunctionName, n: usize) -> Result<NdetReport> {
    let target = build_comm_matrix(name, n)?;
    let b = ndet_svd_protocol(&canonical::for_function(name, n)?)?;
    let acc = acceptance_matrix_with_limit(&b.protocol, n.max(DEFAULT_MAX_TABULATED_BITS))?;
    let mut counterexamples = Vec::new();
    let mut max_prediction_error = 0.0f64;
    for x in 0..target.dim() as u64 {
        for y in 0..target.dim() as u64 {
            let p = acc.get(x, y);
            if (p > PATTERN_TOL) != target.get(x, y) {
                counterexamples.push((x, y));
            }
            max_prediction_error = max_prediction_error.max((p - b.predicted_acceptance(x, y)).abs());
        }
    }
    Ok(NdetReport {
        function: name.to_string(),
        n,
        rank: b.r,
        cost: b.protocol.declared_cost(),
        dead_flag: b.dead_flag,
        pattern_ok: counterexamples.is_empty(),
        counterexamples,
        max_prediction_error,
    })
}
