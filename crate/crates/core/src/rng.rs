//! Seeded randomness for reproducible growth runs.
//!
//! Every run draws from a ChaCha8 stream seeded with a 64-bit value.
//! Replica `k` of a run with master seed `s` uses
//! `splitmix64(s ^ splitmix64(k + 0x9E3779B97F4A7C15))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One round of the SplitMix64 finaliser.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replica `replica` derived from `master`.
pub fn replica_seed(master: u64, replica: u64) -> u64 {
    splitmix64(master ^ splitmix64(replica.wrapping_add(GOLDEN_GAMMA)))
}

#[derive(Debug, Clone)]
pub struct GrowthRng(ChaCha8Rng);

impl GrowthRng {
    pub fn from_seed(seed: u64) -> Self {
        GrowthRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn for_replica(master: u64, replica: u64) -> Self {
        Self::from_seed(replica_seed(master, replica))
    }

    /// Uniform real in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    /// Uniform integer in `0..n`; `n` must be positive.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }
}
