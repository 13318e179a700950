pub mod engine;
pub mod error;
pub mod format;
pub mod linalg;
pub mod rank;
pub mod rng;
pub mod zoo;

pub use engine::{AcceptanceMatrix, Protocol};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use rank::CommMatrix;
