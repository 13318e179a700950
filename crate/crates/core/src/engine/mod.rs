//! The three-register protocol model: Alice, a shared channel, and Bob.
//!
//! Parties alternate, starting with Alice. Each step applies the acting party's
//! input-dependent gates and then sends the channel qubits in its window. The
//! cost of a protocol is the total number of qubits sent. The output bit is
//! channel qubit 0, measured once at the end.

mod audit;
mod decompose;
mod gate;
mod matrix;
mod protocol;
mod simulate;

pub use audit::{rank_bound_audit, rank_ceiling, RankBoundReport};
pub use decompose::{yao_kremer_decompose, TranscriptDecomposition, TranscriptTerm, MAX_TRANSCRIPT_BITS};
pub use gate::{Gate, Permutation, Qubit, Unitary};
pub use matrix::{acceptance_matrix, acceptance_matrix_with_limit, AcceptanceMatrix, DEFAULT_MAX_TABULATED_BITS};
pub use protocol::{Party, Protocol, ProtocolStep, RegisterLayout, MAX_QUBITS};
pub use simulate::{output_probability, simulate, simulate_from, SimulationResult};
