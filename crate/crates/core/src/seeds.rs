//! Deterministic seed derivation.
//!
//! A child seed is `splitmix64(seed + (counter + 1) * 0x9E3779B97F4A7C15)`.
//! Per-sample seeds use the sample index as counter; per-suite seeds use the
//! fixed suite id, so adding a suite never perturbs the samples of another.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, counter: u64) -> u64 {
    splitmix64(seed.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN)))
}
