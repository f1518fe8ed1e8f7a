//! Seeded, stream-labelled PRNG with a fully pinned algorithm.
//!
//! Every random draw in the crate goes through [`Rng`], so runs are
//! reproducible byte-for-byte in any language that follows the recipe:
//!
//! 1. `key = seed ^ fnv1a64(label)` (or, for a substream with index `i`,
//!    `key = seed ^ fnv1a64(label) ^ mix64(i + 1)`).
//! 2. The four xoshiro256** state words are four successive splitmix64
//!    outputs starting from `key`.
//! 3. `uniform01 = (next_u64() >> 11) * 2^-53`, in `[0, 1)`.
//! 4. `uniform(lo, hi) = lo + (hi - lo) * uniform01`.
//! 5. `gaussian(mu, sigma)`: `u1 = 1 - uniform01`, `u2 = uniform01`,
//!    `mu + sigma * sqrt(-2 ln u1) * cos(2π u2)`; one pair of draws per call,
//!    the sine branch is discarded.
//! 6. `below(n) = min(floor(uniform01 * n), n - 1)`; shuffles are
//!    Fisher–Yates from the back (`for i in (1..n).rev() { swap(i, below(i + 1)) }`).

use crate::error::{Error, Result};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    mix64(*state)
}

/// splitmix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct Rng {
    s: [u64; 4],
    label: String,
}

impl Rng {
    pub fn new(seed: u64, label: &str) -> Self {
        Self::from_key(seed ^ fnv1a64(label.as_bytes()), label)
    }

    /// Independent substream `index` of `(seed, label)`, e.g. one per sample.
    pub fn substream(seed: u64, label: &str, index: u64) -> Self {
        Self::from_key(
            seed ^ fnv1a64(label.as_bytes()) ^ mix64(index.wrapping_add(1)),
            label,
        )
    }

    fn from_key(mut key: u64, label: &str) -> Self {
        let s = [
            splitmix64(&mut key),
            splitmix64(&mut key),
            splitmix64(&mut key),
            splitmix64(&mut key),
        ];
        Self {
            s,
            label: label.to_string(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// xoshiro256** step.
    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform01()
    }

    pub fn gaussian(&mut self, mu: f64, sigma: f64) -> Result<f64> {
        if !(sigma >= 0.0) {
            return Err(Error::invalid(format!("gaussian sigma must be >= 0, got {sigma}")));
        }
        Ok(mu + sigma * self.standard_normal())
    }

    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform01();
        let u2 = self.uniform01();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.uniform01() * n as f64) as usize).min(n - 1)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        self.shuffle(&mut p);
        p
    }
}
