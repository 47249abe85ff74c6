//! The crate's single seeded generator.
//!
//! All randomized procedures (partitioning, bootstrap sampling, tie-breaks)
//! draw from [`SeededRng`]: ChaCha8 seeded through `seed_from_u64`, with the
//! bounded-integer and shuffle algorithms implemented here rather than taken
//! from `rand`, whose sampling algorithms are allowed to change between
//! releases. A given seed therefore reproduces the same stream of decisions
//! for as long as the ChaCha8 keystream is stable.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..n` by rejection sampling on the high bits of a
    /// 128-bit product (Lemire). `n` must be non-zero.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.next_u64();
            let product = (x as u128) * (n as u128);
            if (product as u64) >= threshold {
                return (product >> 64) as usize;
            }
        }
    }

    /// Fisher-Yates shuffle, swapping from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// Uniform choice among `candidates`; panics if empty.
    pub fn choose<T: Copy>(&mut self, candidates: &[T]) -> T {
        candidates[self.below(candidates.len())]
    }
}
