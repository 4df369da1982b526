//! Seeding for reproducible simulation streams.
//!
//! Every random stream is a `ChaCha8Rng` seeded from a 64-bit value. Per-frame
//! seeds are derived from the master seed with the SplitMix64 finalizer, so a
//! frame's randomness depends only on `(master_seed, frame_index)` and never
//! on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier written into every results file.
pub const PRNG_ID: &str = "chacha8(rand_chacha 0.9, seed_from_u64)+splitmix64";

pub type SimRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th derived stream.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xD605_BBB5_8C8A_BBFD))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
