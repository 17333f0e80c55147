//! Deterministic derivation of per-trial, per-purpose seeds from one base seed.

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a path of identifiers into `base`.
pub fn derive(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(base), |acc, &p| mix(acc ^ mix(p)))
}

/// Stream identifiers used by the harness.
pub mod stream {
    pub const CHANNELS: u64 = 1;
    pub const SPARSITY: u64 = 2;
    pub const FEATURES: u64 = 3;
    pub const NOISE: u64 = 4;
}
