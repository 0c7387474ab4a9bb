//! Seeded, platform-independent randomness.
//!
//! Every stochastic component draws from a ChaCha8 stream derived from
//! `(user seed, component tag)`, so the two null models and the synthetic
//! generator consume independent streams even when run with the same seed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_RND1: u64 = 0x524e4431; // "RND1"
pub const STREAM_RND2: u64 = 0x524e4432; // "RND2"
pub const STREAM_SYNTH: u64 = 0x53594e54; // "SYNT"

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
