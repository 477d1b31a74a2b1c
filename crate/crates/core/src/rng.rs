//! Counter-based seed derivation. Every random draw in the crate comes from a
//! ChaCha stream keyed by `(master seed, path of labels)`, so results never
//! depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `seed` and a path of integer labels.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Named roles for substreams.
pub mod role {
    pub const XI: u64 = 1;
    pub const TIE_BREAK: u64 = 2;
    pub const SPLIT: u64 = 3;
    pub const PICK: u64 = 4;
    pub const LABELED: u64 = 5;
    pub const TEST: u64 = 6;
    pub const BANK: u64 = 7;
    pub const REP: u64 = 8;
}

pub fn stream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}
