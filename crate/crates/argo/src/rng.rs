//! Seed derivation.
//!
//! Weekly refits, bootstrap replicates, and cross-validation shuffles each
//! draw from their own substream derived with a splitmix64 chain, so work
//! items can run in parallel and still reproduce the sequential results
//! bit-for-bit.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; a stable 64-bit mixer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives an independent substream seed from a root seed and an index.
pub fn substream(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

/// RNG for a derived substream.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream(seed, index))
}

/// Substream index for a weekly refit, stable across runs and ranges.
pub fn week_index(year: i32, week: u8) -> u64 {
    (year as u64) << 6 | week as u64
}
