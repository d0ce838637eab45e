//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! user seed plus a named substream, so independent consumers of one seed
//! never share state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Substream labels used inside the crate.
pub mod label {
    pub const VARIETY_SAMPLES: u64 = 1;
    pub const TUBE: u64 = 2;
    pub const RESTART: u64 = 3;
    pub const PROPOSAL: u64 = 4;
    pub const BISECTION: u64 = 5;
    pub const EQUIVARIANT: u64 = 6;
    pub const TRIALS: u64 = 7;
}

/// Generator for `(seed, label, index)`.
pub fn substream(seed: u64, label: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(label.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index);
    rng
}
