//! Deterministic seed derivation.
//!
//! A seed is derived from an ordered list of words by folding each word into
//! a SplitMix64 state: `state = finalize(state ^ word + GOLDEN)`. Changing any
//! word, or their order, yields an unrelated seed, so adding a new role never
//! perturbs seeds derived for existing roles.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `words` into a single seed.
pub fn derive(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(GOLDEN, |state, &w| finalize((state ^ w).wrapping_add(GOLDEN)))
}

/// Role tags used as the last word of a derivation.
pub mod role {
    pub const INSTANCE: u64 = 1;
    pub const SOLVER: u64 = 2;
    pub const GRADIENT: u64 = 3;
    pub const TRACE: u64 = 4;
    pub const READOUT: u64 = 5;
    pub const JITTER: u64 = 6;
    pub const SIMPLEX: u64 = 7;
    pub const LOSS: u64 = 8;
}
