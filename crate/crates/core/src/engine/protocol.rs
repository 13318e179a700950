use std::fmt;
use std::sync::Arc;

use super::gate::{Gate, Qubit};
use crate::error::{Error, Result};

/// Largest simulable register, in qubits.
pub const MAX_QUBITS: usize = 24;

/// Sizes of Alice's register, the channel and Bob's register.
///
/// Global order is Alice ⊗ channel ⊗ Bob, most significant first; channel qubit
/// 0 carries the output bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    pub alice_qubits: usize,
    pub channel_qubits: usize,
    pub bob_qubits: usize,
}

impl RegisterLayout {
    pub fn new(alice_qubits: usize, channel_qubits: usize, bob_qubits: usize) -> Result<Self> {
        let layout = Self { alice_qubits, channel_qubits, bob_qubits };
        if channel_qubits == 0 {
            return Err(Error::InvalidArgument("the channel needs at least the output qubit".into()));
        }
        if layout.total() > MAX_QUBITS {
            return Err(Error::Capacity(format!("{} qubits exceeds the limit of {MAX_QUBITS}", layout.total())));
        }
        Ok(layout)
    }

    pub fn total(&self) -> usize {
        self.alice_qubits + self.channel_qubits + self.bob_qubits
    }

    pub fn global(&self, q: Qubit) -> usize {
        match q {
            Qubit::Alice(i) => i,
            Qubit::Channel(i) => self.alice_qubits + i,
            Qubit::Bob(i) => self.alice_qubits + self.channel_qubits + i,
        }
    }

    pub fn contains(&self, q: Qubit) -> bool {
        match q {
            Qubit::Alice(i) => i < self.alice_qubits,
            Qubit::Channel(i) => i < self.channel_qubits,
            Qubit::Bob(i) => i < self.bob_qubits,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

type GateBuilder = dyn Fn(u64) -> Result<Vec<Gate>> + Send + Sync;

/// One turn of a protocol: the acting party's input-dependent operations,
/// followed by sending the channel qubits in `window`.
#[derive(Clone)]
pub struct ProtocolStep {
    pub party: Party,
    window: Vec<usize>,
    builder: Arc<GateBuilder>,
}

impl ProtocolStep {
    pub fn new(
        party: Party,
        window: Vec<usize>,
        builder: impl Fn(u64) -> Result<Vec<Gate>> + Send + Sync + 'static,
    ) -> Self {
        Self { party, window, builder: Arc::new(builder) }
    }

    pub fn window(&self) -> &[usize] {
        &self.window
    }

    pub fn message_length(&self) -> usize {
        self.window.len()
    }

    pub fn gates(&self, input: u64) -> Result<Vec<Gate>> {
        (self.builder)(input)
    }
}

impl fmt::Debug for ProtocolStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProtocolStep").field("party", &self.party).field("window", &self.window).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Holder {
    Free,
    InTransit,
    Held(Party),
}

/// A two-party protocol: alternating steps starting with Alice.
///
/// Channel qubits change hands as messages travel. A step may touch its own
/// party's register, channel qubits that party holds, the window it has just
/// received and the window it sends. Everything else is off limits.
#[derive(Debug, Clone)]
pub struct Protocol {
    pub name: String,
    pub layout: RegisterLayout,
    pub input_bits: usize,
    steps: Vec<ProtocolStep>,
    /// `holders[t]` is the channel ownership seen by step `t`; the last entry is final.
    holders: Vec<Vec<Holder>>,
}

impl Protocol {
    pub fn new(
        name: impl Into<String>,
        layout: RegisterLayout,
        input_bits: usize,
        steps: Vec<ProtocolStep>,
    ) -> Result<Self> {
        if input_bits > 32 {
            return Err(Error::Capacity(format!("{input_bits}-bit inputs")));
        }
        let mut holders = vec![vec![Holder::Free; layout.channel_qubits]];
        for (t, step) in steps.iter().enumerate() {
            let expected = if t % 2 == 0 { Party::Alice } else { Party::Bob };
            if step.party != expected {
                return Err(Error::InvalidArgument(format!("step {t} must belong to {expected:?}")));
            }
            let before = holders.last().expect("non-empty").clone();
            let mut after = before.clone();
            for (i, &q) in step.window.iter().enumerate() {
                if q >= layout.channel_qubits {
                    return Err(Error::InvalidArgument(format!("step {t} sends channel qubit {q} out of range")));
                }
                if step.window[..i].contains(&q) {
                    return Err(Error::InvalidArgument(format!("step {t} lists channel qubit {q} twice")));
                }
                if before[q] == Holder::Held(step.party.other()) {
                    return Err(Error::ContractViolation(format!(
                        "step {t} sends channel qubit {q} held by {:?}",
                        step.party.other()
                    )));
                }
            }
            for (q, h) in after.iter_mut().enumerate() {
                if *h == Holder::InTransit {
                    *h = Holder::Held(step.party);
                }
                if step.window.contains(&q) {
                    *h = Holder::InTransit;
                }
            }
            holders.push(after);
        }
        Ok(Self { name: name.into(), layout, input_bits, steps, holders })
    }

    pub fn steps(&self) -> &[ProtocolStep] {
        &self.steps
    }

    /// Total number of qubits sent over all messages.
    pub fn declared_cost(&self) -> usize {
        self.steps.iter().map(ProtocolStep::message_length).sum()
    }

    pub(crate) fn final_holders(&self) -> &[Holder] {
        self.holders.last().expect("non-empty")
    }

    /// Whether step `t` may act on `q`.
    pub(crate) fn may_touch(&self, t: usize, q: Qubit) -> bool {
        let step = &self.steps[t];
        match (q, step.party) {
            (Qubit::Alice(_), Party::Alice) | (Qubit::Bob(_), Party::Bob) => self.layout.contains(q),
            (Qubit::Channel(c), party) => {
                c < self.layout.channel_qubits
                    && (step.window.contains(&c)
                        || matches!(self.holders[t][c], Holder::InTransit)
                        || self.holders[t][c] == Holder::Held(party))
            }
            _ => false,
        }
    }

    /// Gates of step `t` on `input`, with every target checked against the step's access rights.
    pub(crate) fn checked_gates(&self, t: usize, input: u64) -> Result<Vec<Gate>> {
        let gates = self.steps[t].gates(input)?;
        for gate in &gates {
            for &q in gate.targets() {
                if !self.may_touch(t, q) {
                    return Err(Error::ContractViolation(format!(
                        "step {t} ({:?}) touches {q:?} outside its registers and message window",
                        self.steps[t].party
                    )));
                }
            }
        }
        Ok(gates)
    }

    pub(crate) fn check_inputs(&self, x: u64, y: u64) -> Result<()> {
        let limit = 1u64 << self.input_bits;
        if x >= limit || y >= limit {
            return Err(Error::InvalidArgument(format!("inputs must have {} bits", self.input_bits)));
        }
        Ok(())
    }
}
