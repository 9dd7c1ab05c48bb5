//! Reproducible uniform random streams.
//!
//! Each stream is ChaCha8 (`rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`. Uniforms take the top 53 bits of one
//! `next_u64` draw, so a given seed yields the same `f64` sequence on every
//! platform. Per-trajectory seeds come from [`derive_seed`], a SplitMix64
//! finalizer over `(base, index)`, which depends only on the index and not
//! on scheduling order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `index` split off `base`. Distinct indices give distinct
/// seeds (the finalizer is a bijection).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

#[derive(Clone, Debug)]
pub struct UniformStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl UniformStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn split(base: u64, index: u64) -> Self {
        Self::from_seed(derive_seed(base, index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
