//! Seed derivation.
//!
//! Every random stream in a run is a `ChaCha8Rng` whose seed is derived from
//! the master seed by [`derive_seed`]: a splitmix64 finalizer applied to the
//! master seed mixed with a purpose tag and an index. Streams for distinct
//! `(tag, index)` pairs are independent for practical purposes, and a stream
//! never depends on how many values any other stream consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags for derived streams.
pub mod tag {
    pub const RUN: u64 = 0x5255_4e00;
    pub const TOPOLOGY: u64 = 0x544f_504f;
    pub const MODELS: u64 = 0x4d4f_4445;
    pub const ASSIGNMENT: u64 = 0x4153_5349;
    pub const PROFILES: u64 = 0x5052_4f46;
    pub const DATA: u64 = 0x4441_5441;
    pub const SWITCH: u64 = 0x5357_4954;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from `parent` for stream `(tag, index)`.
pub fn derive_seed(parent: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(parent ^ splitmix64(tag)) ^ index.wrapping_mul(0xd6e8_feb8_6659_fd93))
}

pub fn stream(parent: u64, tag: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(parent, tag, index))
}
