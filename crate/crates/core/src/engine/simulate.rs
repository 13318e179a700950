use super::gate::{Gate, Qubit};
use super::protocol::{Party, Protocol, RegisterLayout};
use crate::error::{Error, Result};
use crate::linalg::{apply_permutation_in_place, apply_unitary_in_place, CVector, C64};

/// Outcome of running a protocol on one input pair.
#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub final_state: CVector,
    pub accept_prob: f64,
    pub cost: usize,
    /// Channel qubits each step acted on, for auditing message windows.
    pub touched_channel: Vec<Vec<usize>>,
}

/// Runs `p` on `(x, y)` from the all-zeros state.
pub fn simulate(p: &Protocol, x: u64, y: u64) -> Result<SimulationResult> {
    let mut init = CVector::zeros(1usize << p.layout.total());
    init[0] = C64::new(1.0, 0.0);
    simulate_from(p, x, y, init)
}

/// Runs `p` on `(x, y)` from an arbitrary initial state of the full register.
pub fn simulate_from(p: &Protocol, x: u64, y: u64, initial: CVector) -> Result<SimulationResult> {
    p.check_inputs(x, y)?;
    let total = p.layout.total();
    if initial.dim() != 1usize << total {
        return Err(Error::InvalidArgument(format!("initial state must have dimension 2^{total}")));
    }
    let mut amps = initial.into_vec();
    let mut touched_channel = Vec::with_capacity(p.steps().len());
    for (t, step) in p.steps().iter().enumerate() {
        let input = match step.party {
            Party::Alice => x,
            Party::Bob => y,
        };
        let gates = p.checked_gates(t, input)?;
        let mut touched: Vec<usize> = Vec::new();
        for gate in &gates {
            for q in gate.targets() {
                if let Qubit::Channel(c) = q {
                    if !touched.contains(c) {
                        touched.push(*c);
                    }
                }
            }
            apply_gate(&mut amps, total, gate, &|q| p.layout.global(q));
        }
        touched.sort_unstable();
        touched_channel.push(touched);
    }
    let final_state = CVector::from(amps);
    let accept_prob = output_probability(&final_state, &p.layout);
    Ok(SimulationResult { final_state, accept_prob, cost: p.declared_cost(), touched_channel })
}

pub(crate) fn apply_gate(amps: &mut [C64], total: usize, gate: &Gate, position: &dyn Fn(Qubit) -> usize) {
    match gate {
        Gate::Dense { targets, unitary } => {
            let idx: Vec<usize> = targets.iter().map(|&q| position(q)).collect();
            apply_unitary_in_place(amps, total, unitary.matrix(), &idx);
        }
        Gate::Classical { targets, map } => {
            let idx: Vec<usize> = targets.iter().map(|&q| position(q)).collect();
            apply_permutation_in_place(amps, total, &idx, &|l| map.image(l));
        }
    }
}

/// Probability that channel qubit 0 reads 1.
pub fn output_probability(state: &CVector, layout: &RegisterLayout) -> f64 {
    let bit = 1usize << (layout.total() - 1 - layout.alice_qubits);
    state.as_slice().iter().enumerate().filter(|(i, _)| i & bit != 0).map(|(_, a)| a.norm_sqr()).sum()
}
