//! Deterministic seed derivation.
//!
//! Every random stream in an experiment (episode initial conditions, hidden
//! activation shuffles, optimizer sampling) is keyed by a path of integers
//! such as `(master, run, generation, episode)`, hashed with SplitMix64.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for stream `index` under `parent`.
#[inline]
pub fn derive(parent: u64, index: u64) -> u64 {
    splitmix(splitmix(parent) ^ index.wrapping_mul(GOLDEN).rotate_left(17))
}

/// Folds a whole path into one seed.
pub fn derive_path(root: u64, path: &[u64]) -> u64 {
    path.iter().fold(root, |s, &p| derive(s, p))
}

/// Stream labels, so that unrelated consumers never share a seed.
pub mod stream {
    pub const OPTIMIZER: u64 = 1;
    pub const EVALUATION: u64 = 2;
    pub const EPISODE: u64 = 3;
    pub const SHUFFLE: u64 = 4;
    pub const VALIDATION: u64 = 5;
}
