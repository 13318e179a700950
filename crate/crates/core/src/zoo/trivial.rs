use std::sync::Arc;

use crate::engine::{Gate, Party, Protocol, ProtocolStep, Qubit, RegisterLayout, Unitary};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::rank::CommMatrix;

/// Alice sends `x` in one `n`-qubit message; Bob writes `f(x, y)` into the
/// output qubit with a reversible classical map and sends it back.
pub fn trivial_exact_protocol(f: &CommMatrix) -> Result<Protocol> {
    let n = f.n;
    let layout = RegisterLayout::new(0, n + 1, 0)?;
    let table = Arc::new(f.clone());

    let alice = ProtocolStep::new(Party::Alice, (1..=n).collect(), move |x| {
        Ok((0..n).filter(|k| x >> (n - 1 - k) & 1 == 1).map(|k| Gate::x(Qubit::Channel(k + 1))).collect())
    });
    let bob = ProtocolStep::new(Party::Bob, vec![0], move |y| {
        let table = Arc::clone(&table);
        let targets = (1..=n).chain([0]).map(Qubit::Channel).collect();
        // local index = (x << 1) | out
        Ok(vec![Gate::classical_fn(targets, move |l| l ^ usize::from(table.get((l >> 1) as u64, y)))?])
    });
    Protocol::new(format!("trivial-{}{}", f.name, n), layout, n, vec![alice, bob])
}

/// The trivial protocol with Bob's answer rotated so that it is wrong with
/// probability `error` on every input.
pub fn noisy_exact_protocol(f: &CommMatrix, error: f64) -> Result<Protocol> {
    if !(0.0..=1.0).contains(&error) {
        return Err(Error::InvalidArgument(format!("error rate {error} outside [0, 1]")));
    }
    let exact = trivial_exact_protocol(f)?;
    let theta = error.sqrt().asin();
    let (c, s) = (C64::new(theta.cos(), 0.0), C64::new(theta.sin(), 0.0));
    let rotation = Unitary::new(CMatrix::new(2, 2, vec![c, -s, s, c])?)?;
    let bob = exact.steps()[1].clone();
    let noisy = ProtocolStep::new(Party::Bob, vec![0], move |y| {
        let mut gates = bob.gates(y)?;
        gates.push(Gate::dense(vec![Qubit::Channel(0)], rotation.clone())?);
        Ok(gates)
    });
    Protocol::new(
        format!("noisy-{}", exact.name),
        exact.layout,
        exact.input_bits,
        vec![exact.steps()[0].clone(), noisy],
    )
}
