use std::f64::consts::FRAC_1_SQRT_2;

use crate::engine::{Gate, Party, Permutation, Protocol, ProtocolStep, Qubit, RegisterLayout, Unitary};
use crate::error::{Error, Result};
use crate::linalg::{ceil_log2, CMatrix, C64};

/// Qubits sent by one oracle call on a block of `block` indices: `2(⌈log₂ B⌉ + 1)`.
pub fn oracle_cost(block: usize) -> usize {
    2 * (ceil_log2(block) + 1)
}

/// Bit `i` of a block input, counting from the most significant of `block` bits.
pub fn block_bit(input: u64, block: usize, i: usize) -> bool {
    i < block && input >> (block - 1 - i) & 1 == 1
}

fn hadamard() -> Unitary {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    Unitary::new(CMatrix::new(2, 2, vec![h, h, h, -h]).expect("2x2")).expect("H is unitary")
}

/// The distributed gadget `|i⟩|b⟩ ↦ |i⟩|b ⊕ (x_i ∧ y_i)⟩` for a block of `block` indices.
///
/// Alice holds the index (`⌈log₂ B⌉` qubits) and the target in her register.
/// She sends the index, together with the Hadamard-rotated target when
/// `x_i = 1`; Bob applies `Z` to the target when `y_i = 1` and returns
/// everything; Alice undoes her routing and rotates back.
pub fn distributed_and_oracle(block: usize) -> Result<Protocol> {
    if block == 0 {
        return Err(Error::InvalidArgument("block size must be at least 1".into()));
    }
    let k = ceil_log2(block);
    let layout = RegisterLayout::new(k + 1, k + 2, 0)?;
    let window: Vec<usize> = (1..=k + 1).collect();
    let mut targets: Vec<Qubit> = (0..=k).map(Qubit::Alice).collect();
    targets.extend((1..=k + 1).map(Qubit::Channel));

    // local index = idx (k) | b | channel idx (k) | channel b
    let route = move |x: u64, inverse: bool| {
        move |l: usize| {
            let cb = l & 1;
            let ci = (l >> 1) & ((1 << k) - 1);
            let b = (l >> (k + 1)) & 1;
            let idx = l >> (k + 2);
            let i = if inverse { ci } else { idx };
            let (nb, ncb) = if block_bit(x, block, i) { (cb, b) } else { (b, cb) };
            (ci << (k + 2)) | (nb << (k + 1)) | (idx << 1) | ncb
        }
    };

    let first_targets = targets.clone();
    let alice = ProtocolStep::new(Party::Alice, window.clone(), move |x| {
        Ok(vec![
            Gate::dense(vec![Qubit::Alice(k)], hadamard())?,
            Gate::classical(first_targets.clone(), Permutation::from_fn(2 * k + 2, route(x, false))?)?,
        ])
    });
    let bob = ProtocolStep::new(Party::Bob, window, move |y| {
        let dim = 1usize << (k + 1);
        let diag: Vec<C64> = (0..dim)
            .map(|l| {
                let flip = l & 1 == 1 && block_bit(y, block, l >> 1);
                C64::new(if flip { -1.0 } else { 1.0 }, 0.0)
            })
            .collect();
        Ok(vec![Gate::dense((1..=k + 1).map(Qubit::Channel).collect(), Unitary::new(CMatrix::diag(&diag))?)?])
    });
    let finish = ProtocolStep::new(Party::Alice, vec![], move |x| {
        Ok(vec![
            Gate::classical(targets.clone(), Permutation::from_fn(2 * k + 2, route(x, true))?)?,
            Gate::dense(vec![Qubit::Alice(k)], hadamard())?,
        ])
    });
    Protocol::new(format!("and-oracle-{block}"), layout, block, vec![alice, bob, finish])
}
