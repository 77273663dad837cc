//! Seed derivation.
//!
//! All randomness flows from a user seed through ChaCha8 streams. The
//! stream id selects an independent keystream for the same key, so drops,
//! taps and trajectory steps can be generated in any order (or in parallel)
//! and still reproduce the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// RNG for `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// RNG for a two-level (outer, inner) index, e.g. (drop, tap).
pub fn substream(seed: u64, outer: u64, inner: u64) -> SimRng {
    stream(seed, mix(outer.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ mix(inner)))
}

/// Derive a child seed, used when a whole sub-simulation needs its own seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix(seed ^ mix(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}

// splitmix64 finalizer
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
