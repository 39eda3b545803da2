//! Portable seeded randomness.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood) with its state set to the
//! 64-bit seed. On top of the raw 64-bit output stream the crate uses exactly
//! two derived draws, both defined here so that any implementation in any
//! language can reproduce trajectories bit for bit:
//!
//! * `below(n)`: rejection sampling. Draw `x`; accept when
//!   `x < 2^64 - (2^64 mod n)` and return `x mod n`.
//! * `unit()`: `(x >> 11) * 2^-53`, a float in `[0, 1)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

#[derive(Clone, Debug)]
pub struct PortableRng {
    inner: SplitMix64,
}

impl PortableRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: SplitMix64::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..n`. `n` must be nonzero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        // 2^64 mod n, computed without 128-bit arithmetic.
        let rem = (u64::MAX % n + 1) % n;
        loop {
            let x = self.next_u64();
            if rem == 0 || x < u64::MAX - rem + 1 {
                return x % n;
            }
        }
    }

    /// Uniform float in `[0, 1)` with 53 bits of precision.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fisher–Yates shuffle, walking from the last index down.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Seed for the `index`-th independent sample of a sweep rooted at `seed`.
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index)
}
