use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gate::{Gate, Qubit};
use super::protocol::{Party, Protocol};
use super::simulate::{apply_gate, output_probability};
use crate::error::{Error, Result};
use crate::format::csv_rows;
use crate::linalg::{exact_rank_scaled, CMatrix, CVector, C64};

const PROB_SLACK: f64 = 1e-12;

/// Default cap on input bits for exhaustive tabulation (`2^(2n)` simulations).
pub const DEFAULT_MAX_TABULATED_BITS: usize = 6;

/// `P(x, y)` for all input pairs: row `x`, column `y`, both ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceMatrix {
    pub n: usize,
    pub values: Vec<Vec<f64>>,
}

impl AcceptanceMatrix {
    /// Validates shape and range; entries within `1e-12` outside `[0, 1]` are clamped.
    pub fn new(n: usize, mut values: Vec<Vec<f64>>) -> Result<Self> {
        let dim = 1usize << n;
        if values.len() != dim || values.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument(format!("acceptance matrix for n={n} must be {dim}x{dim}")));
        }
        for row in values.iter_mut() {
            for v in row.iter_mut() {
                if !(*v >= -PROB_SLACK && *v <= 1.0 + PROB_SLACK) {
                    return Err(Error::ContractViolation(format!("acceptance probability {v} out of range")));
                }
                *v = v.clamp(0.0, 1.0);
            }
        }
        Ok(Self { n, values })
    }

    /// Tabulates `f(x, y)` over all pairs.
    pub fn from_fn(n: usize, f: impl Fn(u64, u64) -> f64) -> Result<Self> {
        let dim = 1u64 << n;
        Self::new(n, (0..dim).map(|x| (0..dim).map(|y| f(x, y)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, x: u64, y: u64) -> f64 {
        self.values[x as usize][y as usize]
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim(), self.dim(), |r, c| C64::new(self.values[r][c], 0.0))
    }

    /// Exact rank when all entries are multiples of `2^-20` (within `1e-12`).
    pub fn exact_rank(&self) -> Option<usize> {
        exact_rank_scaled(&self.values, 1 << 20)
    }

    /// Entries `> threshold` as a 0/1 table.
    pub fn support(&self, threshold: f64) -> Vec<Vec<u8>> {
        self.values.iter().map(|r| r.iter().map(|&v| u8::from(v > threshold)).collect()).collect()
    }

    pub fn to_csv(&self) -> String {
        csv_rows(self.values.iter())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain numeric data serializes")
    }
}

/// Acceptance matrix of `p`, refusing inputs wider than [`DEFAULT_MAX_TABULATED_BITS`].
pub fn acceptance_matrix(p: &Protocol) -> Result<AcceptanceMatrix> {
    acceptance_matrix_with_limit(p, DEFAULT_MAX_TABULATED_BITS)
}

/// Acceptance matrix of `p` with an explicit input-width cap; rows run in parallel.
pub fn acceptance_matrix_with_limit(p: &Protocol, max_bits: usize) -> Result<AcceptanceMatrix> {
    if p.input_bits > max_bits {
        return Err(Error::Capacity(format!(
            "tabulating {}-bit inputs needs 2^{} simulations (limit {max_bits} bits)",
            p.input_bits,
            2 * p.input_bits
        )));
    }
    let dim = 1u64 << p.input_bits;
    let values = (0..dim)
        .into_par_iter()
        .map(|x| {
            let mut row = vec![0.0; dim as usize];
            let mut init = vec![C64::new(0.0, 0.0); 1usize << p.layout.total()];
            init[0] = C64::new(1.0, 0.0);
            let ys: Vec<u64> = (0..dim).collect();
            fill_row(p, 0, x, init, &ys, &mut row)?;
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    AcceptanceMatrix::new(p.input_bits, values)
}

/// Runs steps `t..` for one `x` and every `y` in `ys`, applying gates shared by
/// all of `ys` once before branching.
fn fill_row(p: &Protocol, t: usize, x: u64, mut amps: Vec<C64>, ys: &[u64], row: &mut [f64]) -> Result<()> {
    let total = p.layout.total();
    let global = |q| p.layout.global(q);
    let Some(step) = p.steps().get(t) else {
        let prob = output_probability(&CVector::from(amps), &p.layout);
        for &y in ys {
            row[y as usize] = prob;
        }
        return Ok(());
    };
    if step.party == Party::Alice {
        for gate in &p.checked_gates(t, x)? {
            apply_gate(&mut amps, total, gate, &global);
        }
        return fill_row(p, t + 1, x, amps, ys, row);
    }
    let lists: Vec<Vec<Gate>> = ys.iter().map(|&y| p.checked_gates(t, y)).collect::<Result<_>>()?;
    let first = &lists[0];
    let shared =
        (0..first.len()).take_while(|&k| lists.iter().all(|l| l.get(k).is_some_and(|g| g.same_as(&first[k])))).count();
    for gate in &first[..shared] {
        apply_gate(&mut amps, total, gate, &global);
    }
    if lists.iter().all(|l| l.len() == shared) {
        return fill_row(p, t + 1, x, amps, ys, row);
    }
    let classical_tail = lists.iter().all(|l| l[shared..].iter().all(|g| matches!(g, Gate::Classical { .. })));
    if t + 1 == p.steps().len() && classical_tail {
        permuted_outputs(p, &amps, &lists, shared, ys, row);
        return Ok(());
    }
    for (list, &y) in lists.iter().zip(ys) {
        let mut branch = amps.clone();
        for gate in &list[shared..] {
            apply_gate(&mut branch, total, gate, &global);
        }
        fill_row(p, t + 1, x, branch, &[y], row)?;
    }
    Ok(())
}

/// Output probabilities when every `y` ends with basis permutations only. The
/// state is reduced once to its distribution over the qubits they touch, and
/// each `y` just pushes that distribution through its permutations.
fn permuted_outputs(p: &Protocol, amps: &[C64], lists: &[Vec<Gate>], shared: usize, ys: &[u64], row: &mut [f64]) {
    let total = p.layout.total();
    // Local register: the output qubit first (most significant), then every permuted qubit.
    let mut qubits = vec![p.layout.global(Qubit::Channel(0))];
    for gate in lists.iter().flat_map(|l| &l[shared..]) {
        for &q in gate.targets() {
            let g = p.layout.global(q);
            if !qubits.contains(&g) {
                qubits.push(g);
            }
        }
    }
    let k = qubits.len();
    let mut weights = vec![0.0; 1 << k];
    for (i, a) in amps.iter().enumerate() {
        let l = qubits.iter().fold(0, |acc, &q| acc << 1 | (i >> (total - 1 - q) & 1));
        weights[l] += a.norm_sqr();
    }
    let support: Vec<(usize, f64)> = weights.into_iter().enumerate().filter(|&(_, w)| w > 0.0).collect();
    for (list, &y) in lists.iter().zip(ys) {
        let perms: Vec<(Vec<usize>, &super::gate::Permutation)> = list[shared..]
            .iter()
            .map(|g| match g {
                Gate::Classical { targets, map } => {
                    let pos = targets
                        .iter()
                        .map(|&q| k - 1 - qubits.iter().position(|&g| g == p.layout.global(q)).expect("collected"))
                        .collect();
                    (pos, map)
                }
                Gate::Dense { .. } => unreachable!("only permutations remain"),
            })
            .collect();
        let mut prob = 0.0;
        for &(l, w) in &support {
            let mut s = l;
            for (shifts, map) in &perms {
                let m = shifts.len();
                let sub = shifts.iter().fold(0, |acc, &b| acc << 1 | (s >> b & 1));
                let img = map.image(sub);
                for (j, &b) in shifts.iter().enumerate() {
                    s = (s & !(1 << b)) | ((img >> (m - 1 - j) & 1) << b);
                }
            }
            if s >> (k - 1) & 1 == 1 {
                prob += w;
            }
        }
        row[y as usize] = prob;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{simulate, ProtocolStep, Qubit, RegisterLayout, Unitary};

    #[test]
    fn range_is_checked_and_clamped() {
        let m = AcceptanceMatrix::new(1, vec![vec![-1e-13, 1.0 + 1e-13], vec![0.5, 0.0]]).unwrap();
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.get(0, 1), 1.0);
        assert!(AcceptanceMatrix::new(1, vec![vec![1.1, 0.0], vec![0.0, 0.0]]).is_err());
        assert!(AcceptanceMatrix::new(1, vec![vec![0.0]]).is_err());
    }

    #[test]
    fn serialization_formats() {
        let m = AcceptanceMatrix::new(1, vec![vec![1.0, 0.0], vec![1.0 / 3.0, 0.25]]).unwrap();
        assert_eq!(m.to_csv(), "1,0\n0.333333333333,0.25\n");
        assert_eq!(m.to_json(), r#"{"n":1,"values":[[1.0,0.0],[0.3333333333333333,0.25]]}"#);
    }

    #[test]
    fn shared_prefix_evaluation_agrees_with_simulation() {
        // Bob rotates the output by a y-independent angle, then XORs y.
        let s = 0.6f64;
        let c = (1.0 - s * s).sqrt();
        let rot = Unitary::new(
            CMatrix::new(2, 2, vec![C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)]).unwrap(),
        )
        .unwrap();
        let steps = vec![
            ProtocolStep::new(Party::Alice, vec![1], |x| {
                Ok(if x & 1 == 1 { vec![Gate::x(Qubit::Channel(1))] } else { vec![] })
            }),
            ProtocolStep::new(Party::Bob, vec![0], move |y| {
                let mut g = vec![Gate::dense(vec![Qubit::Channel(0)], rot.clone())?];
                g.push(Gate::classical_fn(vec![Qubit::Channel(1), Qubit::Channel(0)], move |l| {
                    l ^ usize::from(y & 1 == 1 && l >> 1 == 1)
                })?);
                Ok(g)
            }),
        ];
        let p = Protocol::new("rot", RegisterLayout::new(0, 2, 0).unwrap(), 2, steps).unwrap();
        let m = acceptance_matrix(&p).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert!((m.get(x, y) - simulate(&p, x, y).unwrap().accept_prob).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn wide_inputs_need_an_explicit_limit() {
        let p = Protocol::new("silent", RegisterLayout::new(0, 1, 0).unwrap(), 7, vec![]).unwrap();
        assert!(matches!(acceptance_matrix(&p), Err(Error::Capacity(_))));
        assert_eq!(acceptance_matrix_with_limit(&p, 7).unwrap().dim(), 128);
    }
}
