//! Portable seeded random numbers.
//!
//! The stream is SplitMix64. Uniforms take the top 53 bits of a word,
//! `(word >> 11) * 2^-53`, which lands in `[0, 1)`. Standard normals use
//! Box–Muller on a pair of uniforms `(u1, u2)`:
//!
//! ```text
//! radius = sqrt(-2 ln(1 - u1))
//! z0 = radius * cos(2π u2)     returned first
//! z1 = radius * sin(2π u2)     cached and returned on the next call
//! ```
//!
//! Using `1 - u1` keeps the logarithm finite. Every step is specified so
//! that other implementations can reproduce the same sequence bit for bit
//! on IEEE-754 platforms with a correctly rounded libm.

use core::f64::consts::PI;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RngStream {
    seed: u64,
    state: u64,
    cached_normal: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { seed, state: seed, cached_normal: None }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let radius = libm::sqrt(-2.0 * libm::log(1.0 - u1));
        let angle = 2.0 * PI * u2;
        self.cached_normal = Some(radius * libm::sin(angle));
        radius * libm::cos(angle)
    }

    /// Child stream for index `k`, independent of how far this stream has
    /// advanced: the child seed is `mix64(seed + (k + 1)·γ)`.
    pub fn split(&self, k: u64) -> RngStream {
        RngStream::new(mix64(self.seed.wrapping_add(k.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA))))
    }
}
