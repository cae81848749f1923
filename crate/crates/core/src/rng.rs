//! Deterministic, portable random number generation.
//!
//! All randomness in the crate flows from a single global 64-bit seed through
//! [`SplitMix64`], a counter-based generator: the i-th output is a fixed
//! avalanche mix of `seed + (i+1)·GAMMA` (Steele, Lea & Flood's SplitMix64
//! with the golden-gamma increment). It is tiny, passes BigCrush, has no
//! platform-dependent state, and needs no OS entropy — the same seed produces
//! the same stream on every target, including wasm.
//!
//! Purpose-specific streams are derived with [`derive_seed`], which mixes the
//! global seed with an FNV-1a hash of a purpose tag and an index. That keeps
//! draw counts in one stage (e.g. channel generation for row 17) from
//! perturbing any other stage.

use num_complex::Complex64;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 counter-based generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        // Modulo bias is below 2^-53 for the sizes used here.
        (self.next_f64() * n as f64) as usize % n.max(1)
    }

    /// Standard normal pair via Box–Muller (two uniforms per pair, no cached
    /// state, so draw counts stay predictable).
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        // 1 - u1 ∈ (0, 1] keeps the log argument strictly positive.
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        (r * t.cos(), r * t.sin())
    }

    pub fn normal(&mut self) -> f64 {
        self.normal_pair().0
    }

    /// Circularly symmetric complex normal with unit variance
    /// (re, im ~ N(0, 1/2)).
    pub fn complex_normal(&mut self) -> Complex64 {
        let (a, b) = self.normal_pair();
        Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Unit-modulus complex number with uniform phase.
    pub fn unit_phase(&mut self) -> Complex64 {
        let t = self.uniform(0.0, 2.0 * std::f64::consts::PI);
        Complex64::new(t.cos(), t.sin())
    }

    /// Deterministic Fisher–Yates permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.below(i + 1);
            idx.swap(i, j);
        }
        idx
    }
}

fn mix64(z: u64) -> u64 {
    let mut z = z;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed for one purpose-specific stream:
/// `mix64(global ⊕ rotl(fnv1a(tag), 17) ⊕ mix64(index))`.
pub fn derive_seed(global: u64, tag: &str, index: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.as_bytes() {
        h = (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01B3);
    }
    mix64(global ^ h.rotate_left(17) ^ mix64(index.wrapping_mul(GOLDEN_GAMMA)))
}
