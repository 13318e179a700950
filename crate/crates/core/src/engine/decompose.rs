//! Transcript decomposition of a protocol's final state.
//!
//! Each message is expanded in the computational basis of its window, so the
//! final state splits into `2^ℓ` terms `A_i(x) ⊗ |c_i⟩ ⊗ B_i(y)` where `c_i` is
//! the content of the in-flight channel qubits fixed by transcript `i`.
//! `A_i` lives on Alice's register together with the channel qubits she holds
//! (zero elsewhere on the channel); `B_i` likewise for Bob.

use super::gate::Qubit;
use super::protocol::{Holder, Party, Protocol, RegisterLayout};
use super::simulate::apply_gate;
use crate::error::{Error, Result};
use crate::linalg::{CVector, C64, ZERO};

/// Largest transcript length the decomposition will enumerate.
pub const MAX_TRANSCRIPT_BITS: usize = 12;

#[derive(Debug, Clone)]
pub struct TranscriptTerm {
    /// Transcript bits, first message most significant.
    pub transcript: u64,
    /// Alice's vector over `alice ⊗ channel` (`2^(a+c)` entries).
    pub alice: CVector,
    /// Bob's vector over `channel ⊗ bob` (`2^(c+b)` entries).
    pub bob: CVector,
    /// Basis content of the channel qubits still in flight, as channel-index bits.
    pub channel: u64,
}

#[derive(Debug, Clone)]
pub struct TranscriptDecomposition {
    pub layout: RegisterLayout,
    pub ell: usize,
    /// Transcript position (0-based from the first bit) of the output bit, if the
    /// output qubit is in flight at the end.
    pub out_bit_index: Option<usize>,
    pub terms: Vec<TranscriptTerm>,
}

fn channel_mask(layout: &RegisterLayout, q: usize) -> u64 {
    1u64 << (layout.channel_qubits - 1 - q)
}

impl TranscriptTerm {
    /// Alice's vector with the in-flight channel content written into its channel part.
    pub fn alice_with_channel(&self) -> CVector {
        let mut out = CVector::zeros(self.alice.dim());
        for (i, a) in self.alice.as_slice().iter().enumerate() {
            if *a != ZERO {
                out[i | self.channel as usize] += *a;
            }
        }
        out
    }

    pub fn output_bit(&self, layout: &RegisterLayout) -> bool {
        self.channel & channel_mask(layout, 0) != 0
    }
}

impl TranscriptDecomposition {
    /// Re-embeds `Σ_i A_i ⊗ |c_i⟩ ⊗ B_i` into the global register.
    pub fn reconstruct(&self) -> CVector {
        let l = &self.layout;
        let (c, b) = (l.channel_qubits, l.bob_qubits);
        let cmask = (1usize << c) - 1;
        let bmask = (1usize << b) - 1;
        let mut out = CVector::zeros(1usize << l.total());
        for term in &self.terms {
            let alice: Vec<(usize, C64)> =
                term.alice.as_slice().iter().copied().enumerate().filter(|(_, a)| *a != ZERO).collect();
            for (bi, bv) in term.bob.as_slice().iter().enumerate() {
                if *bv == ZERO {
                    continue;
                }
                let (b_ch, b_reg) = (bi >> b, bi & bmask);
                for &(ai, av) in &alice {
                    let (a_reg, a_ch) = (ai >> c, ai & cmask);
                    debug_assert_eq!(a_ch & b_ch, 0);
                    let chan = a_ch | b_ch | term.channel as usize;
                    out[(a_reg << (c + b)) | (chan << b) | b_reg] += av * bv;
                }
            }
        }
        out
    }

    /// Terms whose output bit is 1; empty when the output qubit is not in flight.
    pub fn accepting_terms(&self) -> impl Iterator<Item = &TranscriptTerm> {
        let ok = self.out_bit_index.is_some();
        self.terms.iter().filter(move |t| ok && t.output_bit(&self.layout))
    }
}

/// Decomposes the final state of `p` on `(x, y)` into transcript terms.
pub fn yao_kremer_decompose(p: &Protocol, x: u64, y: u64) -> Result<TranscriptDecomposition> {
    p.check_inputs(x, y)?;
    let ell = p.declared_cost();
    if ell > MAX_TRANSCRIPT_BITS {
        return Err(Error::Capacity(format!("{ell} transcript bits exceeds {MAX_TRANSCRIPT_BITS}")));
    }
    let l = p.layout;
    let (a, c, b) = (l.alice_qubits, l.channel_qubits, l.bob_qubits);

    let mut terms = vec![TranscriptTerm {
        transcript: 0,
        alice: CVector::basis(1 << (a + c), 0),
        bob: CVector::basis(1 << (c + b), 0),
        channel: 0,
    }];

    for (t, step) in p.steps().iter().enumerate() {
        let input = if step.party == Party::Alice { x } else { y };
        let gates = p.checked_gates(t, input)?;
        let window = step.window();
        let wmask: u64 = window.iter().map(|&q| channel_mask(&l, q)).sum();
        let patterns: Vec<u64> = (0..1u64 << window.len())
            .map(|m| {
                window
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| m >> (window.len() - 1 - k) & 1 == 1)
                    .map(|(_, &q)| channel_mask(&l, q))
                    .sum()
            })
            .collect();
        // (local qubit count, shift of channel bits inside the local index)
        let (local_total, shift) = match step.party {
            Party::Alice => (a + c, 0),
            Party::Bob => (c + b, b),
        };
        let position = |q: Qubit| match (step.party, q) {
            (Party::Alice, Qubit::Alice(i)) => i,
            (Party::Alice, Qubit::Channel(j)) => a + j,
            (Party::Bob, Qubit::Channel(j)) => j,
            (Party::Bob, Qubit::Bob(i)) => c + i,
            _ => unreachable!("access rights were checked"),
        };

        let mut next = Vec::with_capacity(terms.len() << window.len());
        for term in terms {
            let own = if step.party == Party::Alice { &term.alice } else { &term.bob };
            let mut local = CVector::zeros(own.dim());
            let received = (term.channel as usize) << shift;
            for (i, v) in own.as_slice().iter().enumerate() {
                if *v != ZERO {
                    debug_assert_eq!(i & received, 0);
                    local[i | received] += *v;
                }
            }
            let mut amps = local.into_vec();
            for gate in &gates {
                apply_gate(&mut amps, local_total, gate, &position);
            }
            let local_wmask = (wmask as usize) << shift;
            for (m, &pattern) in patterns.iter().enumerate() {
                let want = (pattern as usize) << shift;
                let mut projected = CVector::zeros(amps.len());
                for (i, v) in amps.iter().enumerate() {
                    if i & local_wmask == want && *v != ZERO {
                        projected[i & !local_wmask] = *v;
                    }
                }
                let transcript = (term.transcript << window.len()) | m as u64;
                let (alice, bob) = match step.party {
                    Party::Alice => (projected, term.bob.clone()),
                    Party::Bob => (term.alice.clone(), projected),
                };
                next.push(TranscriptTerm { transcript, alice, bob, channel: pattern });
            }
        }
        terms = next;
    }

    let out_bit_index = match (p.final_holders()[0], p.steps().last()) {
        (Holder::InTransit, Some(last)) => {
            let k = last.window().iter().position(|&q| q == 0).expect("in-flight qubits form the last window");
            Some(ell - last.message_length() + k)
        }
        _ => None,
    };
    Ok(TranscriptDecomposition { layout: l, ell, out_bit_index, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{simulate, Gate, ProtocolStep};

    /// Alice writes her bit onto the output qubit and sends it.
    fn send_x() -> Protocol {
        let step = ProtocolStep::new(Party::Alice, vec![0], |x| {
            Ok(if x == 1 { vec![Gate::x(Qubit::Channel(0))] } else { vec![] })
        });
        Protocol::new("send-x", RegisterLayout::new(0, 1, 0).unwrap(), 1, vec![step]).unwrap()
    }

    #[test]
    fn one_classical_message() {
        let p = send_x();
        let d = yao_kremer_decompose(&p, 0, 0).unwrap();
        assert_eq!(d.terms.len(), 2);
        assert_eq!(d.out_bit_index, Some(0));
        assert!(d.terms[0].alice.norm() > 0.5);
        assert_eq!(d.terms[1].alice.norm(), 0.0);
        for x in 0..2 {
            let d = yao_kremer_decompose(&p, x, 0).unwrap();
            assert!(d.reconstruct().distance(&simulate(&p, x, 0).unwrap().final_state) < 1e-12);
            assert_eq!(d.accepting_terms().count(), 1);
        }
    }

    #[test]
    fn silent_protocol_has_one_empty_transcript() {
        let p = Protocol::new("silent", RegisterLayout::new(1, 1, 1).unwrap(), 1, vec![]).unwrap();
        let d = yao_kremer_decompose(&p, 1, 1).unwrap();
        assert_eq!((d.ell, d.terms.len(), d.out_bit_index), (0, 1, None));
        assert_eq!(d.accepting_terms().count(), 0);
    }

    #[test]
    fn long_transcripts_are_refused() {
        let steps = vec![ProtocolStep::new(Party::Alice, (0..13).collect(), |_| Ok(vec![]))];
        let p = Protocol::new("wide", RegisterLayout::new(0, 13, 0).unwrap(), 1, steps).unwrap();
        assert!(matches!(yao_kremer_decompose(&p, 0, 0), Err(Error::Capacity(_))));
    }
}
