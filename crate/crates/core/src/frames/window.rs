use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::grid::{SampledFunction, SampledGrid};
use crate::{C64, MAX_DIM};

/// Analytic window families with closed-form Fourier transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum WindowKind {
    /// `2^{d/4} e^{-pi |x|^2}`
    Gaussian,
    /// `(2a)^{d/4} e^{-pi a |x|^2}`
    DilatedGaussian { a: f64 },
    /// Tensor product of Hermite functions `h_k` adapted to `e^{-pi x^2}`.
    Hermite { orders: [u32; MAX_DIM] },
}

/// A separable window `g(x) = c * prod_i phi_i(x_i)` with `||g||_2 = c`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Window {
    kind: WindowKind,
    dim: usize,
    normalization: f64,
}

impl Window {
    pub fn gaussian(dim: usize) -> Result<Self> {
        Self::new(WindowKind::Gaussian, dim)
    }

    pub fn dilated_gaussian(dim: usize, a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(invalid("dilation parameter must be positive"));
        }
        Self::new(WindowKind::DilatedGaussian { a }, dim)
    }

    pub fn hermite(orders: &[u32]) -> Result<Self> {
        if orders.is_empty() || orders.len() > MAX_DIM {
            return Err(invalid("Hermite window needs one order per axis"));
        }
        let mut o = [0; MAX_DIM];
        o[..orders.len()].copy_from_slice(orders);
        Self::new(WindowKind::Hermite { orders: o }, orders.len())
    }

    fn new(kind: WindowKind, dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid("window dimension must be between 1 and 4"));
        }
        Ok(Window {
            kind,
            dim,
            normalization: 1.0,
        })
    }

    /// Same shape with L2 norm `norm`.
    pub fn with_normalization(mut self, norm: f64) -> Result<Self> {
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("window normalization must be positive"));
        }
        self.normalization = norm;
        Ok(self)
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Short identifier used in exported metadata.
    pub fn label(&self) -> alloc::string::String {
        use alloc::format;
        match self.kind {
            WindowKind::Gaussian => format!("gaussian(d={})", self.dim),
            WindowKind::DilatedGaussian { a } => format!("dilated_gaussian(d={},a={a})", self.dim),
            WindowKind::Hermite { orders } => {
                format!("hermite(d={},k={:?})", self.dim, &orders[..self.dim])
            }
        }
    }

    /// One-dimensional factor on `axis`, L2-normalized.
    pub fn axis_value(&self, axis: usize, x: f64) -> f64 {
        match self.kind {
            WindowKind::Gaussian => 2f64.powf(0.25) * (-PI * x * x).exp(),
            WindowKind::DilatedGaussian { a } => (2.0 * a).powf(0.25) * (-PI * a * x * x).exp(),
            WindowKind::Hermite { orders } => hermite_function(orders[axis], x),
        }
    }

    /// Fourier transform of the one-dimensional factor on `axis`.
    pub fn axis_spectrum(&self, axis: usize, xi: f64) -> C64 {
        match self.kind {
            WindowKind::Gaussian => C64::new(self.axis_value(axis, xi), 0.0),
            WindowKind::DilatedGaussian { a } => {
                C64::new((2.0 / a).powf(0.25) * (-PI * xi * xi / a).exp(), 0.0)
            }
            WindowKind::Hermite { orders } => {
                let k = orders[axis];
                // h_k is an eigenfunction of the Fourier transform with eigenvalue (-i)^k
                let phase = match k % 4 {
                    0 => C64::new(1.0, 0.0),
                    1 => C64::new(0.0, -1.0),
                    2 => C64::new(-1.0, 0.0),
                    _ => C64::new(0.0, 1.0),
                };
                phase * hermite_function(k, xi)
            }
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (0..self.dim)
            .map(|axis| self.axis_value(axis, x[axis]))
            .product::<f64>()
            * self.normalization
    }

    pub fn spectrum(&self, xi: &[f64]) -> C64 {
        (0..self.dim)
            .map(|axis| self.axis_spectrum(axis, xi[axis]))
            .fold(C64::new(self.normalization, 0.0), |acc, v| acc * v)
    }

    /// Half-width beyond which the factor on `axis` stays below `tol` times
    /// its maximum.
    pub fn space_radius(&self, axis: usize, tol: f64) -> f64 {
        match self.kind {
            WindowKind::Gaussian => ((1.0 / tol).ln() / PI).sqrt(),
            WindowKind::DilatedGaussian { a } => ((1.0 / tol).ln() / (PI * a)).sqrt(),
            WindowKind::Hermite { orders } => hermite_radius(orders[axis], tol),
        }
    }

    /// Frequency counterpart of [`space_radius`](Self::space_radius).
    pub fn frequency_radius(&self, axis: usize, tol: f64) -> f64 {
        match self.kind {
            WindowKind::DilatedGaussian { a } => (a * (1.0 / tol).ln() / PI).sqrt(),
            _ => self.space_radius(axis, tol),
        }
    }

    /// Largest frequency radius over all axes.
    pub fn max_frequency_radius(&self, tol: f64) -> f64 {
        (0..self.dim)
            .map(|a| self.frequency_radius(a, tol))
            .fold(0.0, f64::max)
    }

    /// Fraction of `||g||^2` outside the cube `[-half, half]^d`.
    pub fn mass_outside(&self, half: f64) -> f64 {
        let inside: f64 = (0..self.dim)
            .map(|axis| {
                let tail = match self.kind {
                    WindowKind::Gaussian => libm::erfc((2.0 * PI).sqrt() * half),
                    WindowKind::DilatedGaussian { a } => libm::erfc((2.0 * PI * a).sqrt() * half),
                    WindowKind::Hermite { orders } => {
                        let k = orders[axis];
                        let step = 1.0 / 256.0;
                        let span = 12.0 + ((2 * k + 1) as f64 / (2.0 * PI)).sqrt();
                        let count = (span / step) as usize;
                        2.0 * (0..=count)
                            .map(|i| {
                                let x = half + i as f64 * step;
                                let w = if i == 0 || i == count { 0.5 } else { 1.0 };
                                w * hermite_function(k, x).powi(2)
                            })
                            .sum::<f64>()
                            * step
                    }
                };
                1.0 - tail.min(1.0)
            })
            .product();
        (1.0 - inside).max(0.0)
    }

    /// Samples the window on `grid`, rejecting grids that truncate more
    /// than `1e-12` of its mass.
    pub fn sample(&self, grid: &SampledGrid) -> Result<SampledFunction> {
        if grid.dim() != self.dim {
            return Err(Error::GridMismatch("window and grid dimensions differ".into()));
        }
        let outside = self.mass_outside(grid.period() / 2.0);
        if outside > 1e-12 {
            return Err(Error::GridMismatch(alloc::format!(
                "grid period {} truncates {outside:e} of the window mass",
                grid.period()
            )));
        }
        Ok(grid.sample(|x| C64::new(self.value(x), 0.0)))
    }
}

/// L2-normalized Hermite function of order `k` adapted to `e^{-pi x^2}`:
/// `h_k(x) = 2^{1/4} (2^k k!)^{-1/2} H_k(sqrt(2 pi) x) e^{-pi x^2}`.
pub fn hermite_function(k: u32, x: f64) -> f64 {
    let u = (2.0 * PI).sqrt() * x;
    let h0 = 2f64.powf(0.25) * (-PI * x * x).exp();
    if k == 0 {
        return h0;
    }
    let mut prev = h0;
    let mut cur = 2f64.sqrt() * u * h0;
    for n in 1..k {
        let n = n as f64;
        let next = (2.0 / (n + 1.0)).sqrt() * u * cur - (n / (n + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn hermite_radius(k: u32, tol: f64) -> f64 {
    let turning = ((2 * k + 1) as f64 / (2.0 * PI)).sqrt();
    let outer = turning + ((1.0 / tol).ln() / PI).sqrt() + 2.0;
    let step = 1.0 / 128.0;
    let count = (outer / step) as usize;
    let peak = (0..=count)
        .map(|i| hermite_function(k, i as f64 * step).abs())
        .fold(0.0, f64::max);
    for i in (0..=count).rev() {
        let x = i as f64 * step;
        if hermite_function(k, x).abs() > tol * peak {
            return x + step;
        }
    }
    step
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l2_norm_sq(w: &Window, grid: &SampledGrid) -> f64 {
        w.sample(grid).unwrap().norm().powi(2)
    }

    #[test]
    fn windows_are_normalized() {
        let grid = SampledGrid::new(1, 512, 16.0).unwrap();
        for w in [
            Window::gaussian(1).unwrap(),
            Window::dilated_gaussian(1, 0.5).unwrap(),
            Window::dilated_gaussian(1, 3.0).unwrap(),
            Window::hermite(&[0]).unwrap(),
            Window::hermite(&[3]).unwrap(),
            Window::hermite(&[6]).unwrap(),
        ] {
            assert!((l2_norm_sq(&w, &grid) - 1.0).abs() < 1e-8, "{:?}", w);
        }
        let grid2 = SampledGrid::new(2, 128, 12.0).unwrap();
        let w = Window::hermite(&[1, 2]).unwrap().with_normalization(2.0).unwrap();
        assert!((w.sample(&grid2).unwrap().norm() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn closed_form_spectrum_matches_fft() {
        let grid = SampledGrid::new(1, 512, 16.0).unwrap();
        for w in [
            Window::gaussian(1).unwrap(),
            Window::dilated_gaussian(1, 2.0).unwrap(),
            Window::hermite(&[1]).unwrap(),
            Window::hermite(&[4]).unwrap(),
        ] {
            let spec = w.sample(&grid).unwrap().spectrum();
            let peak = spec.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (k, v) in spec.iter().enumerate() {
                let xi = grid.frequency(k);
                assert!((v - w.spectrum(&[xi])).norm() <= 1e-6 * peak, "{:?} at {xi}", w);
            }
        }
    }

    #[test]
    fn radius_bounds_the_tail() {
        for w in [
            Window::gaussian(1).unwrap(),
            Window::dilated_gaussian(1, 0.3).unwrap(),
            Window::hermite(&[5]).unwrap(),
        ] {
            let r = w.space_radius(0, 1e-10);
            let peak = (0..2000).map(|i| w.axis_value(0, i as f64 * 0.005).abs()).fold(0.0, f64::max);
            for i in 0..400 {
                let x = r + i as f64 * 0.01;
                assert!(w.axis_value(0, x).abs() <= 1e-10 * peak * 1.0001);
            }
        }
    }

    #[test]
    fn sampling_rejects_short_grids() {
        let grid = SampledGrid::new(1, 64, 2.0).unwrap();
        assert!(matches!(
            Window::gaussian(1).unwrap().sample(&grid),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn invalid_parameters() {
        assert!(Window::dilated_gaussian(1, 0.0).is_err());
        assert!(Window::gaussian(0).is_err());
        assert!(Window::gaussian(1).unwrap().with_normalization(-1.0).is_err());
    }
}
