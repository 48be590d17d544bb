//! Counter-based seed derivation.
//!
//! Every random stream is addressed by a path below a root seed
//! (root → basis → permutation → sample), so results never depend on how
//! work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `index` below `parent`.
pub fn derive(parent: u64, index: u64) -> u64 {
    splitmix64(parent ^ splitmix64(index.wrapping_add(0xD1B5_4A32_D192_ED03)))
}

pub fn derive_path(root: u64, path: &[u64]) -> u64 {
    path.iter().fold(root, |s, &i| derive(s, i))
}

pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Domain tags that keep independent uses of the same root seed apart.
pub mod domain {
    pub const STATES: u64 = 0x5354_4154;
    pub const PERMUTATIONS: u64 = 0x5045_524D;
    pub const BASES: u64 = 0x4241_5345;
}
