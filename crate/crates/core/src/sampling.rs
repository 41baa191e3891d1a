// SPDX-License-Identifier: Apache-2.0

//! Counter-based random draws.
//!
//! Every value is addressed by `(seed, stream tag, index)`, so a draw does not
//! depend on how many other values were drawn before it or in which order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` used for uniform disorder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let iv = Self { lo, hi };
        iv.validate("interval")?;
        Ok(iv)
    }

    /// Degenerate interval holding a single value.
    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// `[c − δ, c + δ]`.
    pub fn around(center: f64, half_width: f64) -> Result<Self> {
        Self::new(center - half_width, center + half_width)
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo > self.hi {
            return Err(Error::param(format!(
                "{name}: invalid interval [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Map a unit draw `u ∈ [0, 1)` into the interval.
    pub fn at(&self, u: f64) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        (self.lo + u * (self.hi - self.lo)).min(self.hi)
    }
}

/// Stable 64-bit stream identifier for a tag (FNV-1a).
pub fn stream_id(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Uniform draw in `[0, 1)` addressed by `(seed, tag, index)`.
pub fn unit_draw(seed: u64, tag: &str, index: u64) -> f64 {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(tag));
    rng.set_word_pos(index as u128 * 2);
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `n` uniform draws from `interval` at indices `0..n` of a stream.
pub fn uniform_array(seed: u64, tag: &str, interval: Interval, n: usize) -> Vec<f64> {
    (0..n as u64)
        .map(|i| interval.at(unit_draw(seed, tag, i)))
        .collect()
}

/// Sequential generator over one stream, for bulk draws.
pub struct Stream {
    rng: ChaCha12Rng,
}

impl Stream {
    pub fn new(seed: u64, tag: &str) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id(tag));
        Self { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha12Rng {
        &mut self.rng
    }

    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
