//! Seed splitting so that parallel and serial runs draw identical streams.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator for sub-run `index` of the master `seed`.
pub fn split_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A derived seed for sub-run `index`.
pub fn split_seed(seed: u64, index: u64) -> u64 {
    split_rng(seed, index).next_u64()
}
