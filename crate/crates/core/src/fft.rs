//! Radix-2 complex FFT for power-of-two lengths.
//!
//! Transforms are unnormalized: `forward` computes `X_k = sum_j x_j e^{-2 pi i jk/n}`
//! and `inverse` the same sum with the opposite sign.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::C64;

#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    twiddles: Vec<C64>,
    bitrev: Vec<usize>,
}

impl FftPlan {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(invalid("FFT length must be a nonzero power of two"));
        }
        let twiddles = (0..n / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / n as f64;
                C64::new(angle.cos(), angle.sin())
            })
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Ok(FftPlan { n, twiddles, bitrev })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.run(data, false);
    }

    pub fn inverse(&self, data: &mut [C64]) {
        self.run(data, true);
    }

    fn run(&self, data: &mut [C64], inverse: bool) {
        assert_eq!(data.len(), self.n, "FFT buffer length mismatch");
        for i in 0..self.n {
            let j = self.bitrev[i];
            if j > i {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= self.n {
            let half = len / 2;
            let step = self.n / len;
            for start in (0..self.n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * step];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// Applies a 1-D transform along every axis of a row-major cube with `side`
/// points per axis.
pub(crate) fn transform_cube(plan: &FftPlan, data: &mut [C64], dim: usize, inverse: bool) {
    let side = plan.len();
    let mut line = alloc::vec![C64::new(0.0, 0.0); side];
    for axis in 0..dim {
        let stride = side.pow((dim - 1 - axis) as u32);
        let outer = data.len() / (side * stride);
        for o in 0..outer {
            for s in 0..stride {
                let base = o * side * stride + s;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[base + i * stride];
                }
                if inverse {
                    plan.inverse(&mut line);
                } else {
                    plan.forward(&mut line);
                }
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
}
