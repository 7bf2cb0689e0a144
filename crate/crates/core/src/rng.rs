//! Seeded randomness shared by every module.
//!
//! All randomness flows through [`SimRng`] (ChaCha8) so that outputs are
//! bit-identical across runs and platforms for a given seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed from `(seed, tag)`.
///
/// Used for combiner shadows (`b'A'`, `b'B'`), the combiner's physical cache
/// (`b'P'`), prediction noise (`b'N'`) and workload sampling (`b'W'`).
pub fn child_seed(seed: u64, tag: u8) -> u64 {
    splitmix64(splitmix64(seed) ^ (u64::from(tag) << 56 | u64::from(tag)))
}
