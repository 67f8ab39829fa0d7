//! Seed derivation. Every random choice in a run comes from one 64-bit seed
//! fanned out to named streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step; a bijection on `u64`.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives the sub-seed for a named stage. Stable across platforms.
pub fn derive(seed: u64, stream: &str) -> u64 {
    // FNV-1a over the stream name, then mixed with the root seed.
    let tag = stream.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    });
    splitmix64(seed ^ splitmix64(tag))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
