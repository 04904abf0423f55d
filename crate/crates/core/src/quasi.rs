//! Deterministic point sequences: Halton low-discrepancy points and a
//! small SplitMix64 generator for start vectors.

use alloc::vec::Vec;

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

/// Halton points in `[0, 1)^dim`, starting `offset` entries into the sequence.
#[derive(Debug, Clone)]
pub struct Halton {
    dim: usize,
    next: u64,
}

impl Halton {
    /// At most 8 coordinates are supported.
    pub fn new(dim: usize, offset: u64) -> Self {
        assert!(dim <= PRIMES.len(), "Halton sequence supports up to 8 coordinates");
        Halton {
            dim,
            next: offset + 1,
        }
    }

    pub fn take_points(&mut self, count: usize) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.next_point()).collect()
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let i = self.next;
        self.next += 1;
        PRIMES[..self.dim].iter().map(|&p| radical_inverse(i, p)).collect()
    }
}

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_signed(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }
}
