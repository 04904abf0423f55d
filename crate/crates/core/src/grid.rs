//! Periodic sampling grids and sampled functions.
//!
//! A grid with `n` points per axis and spacing `h` samples the cube
//! `[-L/2, L/2)^d`, `L = n h`, at `x_j = (j - n/2) h`. Its frequency grid is
//! `xi_k = (k - n/2) / L`. [`SampledGrid::forward`] approximates the continuous
//! transform `F f(xi) = int f(x) e^{-2 pi i x.xi} dx` on that frequency grid and
//! [`SampledGrid::inverse`] undoes it exactly.

use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::fft::{transform_cube, FftPlan};
use crate::{C64, MAX_DIM};

#[derive(Debug, Clone)]
pub struct SampledGrid {
    dim: usize,
    points: usize,
    spacing: f64,
    plan: FftPlan,
}

impl PartialEq for SampledGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.points == other.points && self.spacing == other.spacing
    }
}

impl SampledGrid {
    pub fn new(dim: usize, points: usize, period: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid("grid dimension must be between 1 and 4"));
        }
        if points < 2 || !points.is_power_of_two() {
            return Err(invalid("points per axis must be a power of two (at least 2)"));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(invalid("grid period must be positive"));
        }
        Ok(SampledGrid {
            dim,
            points,
            spacing: period / points as f64,
            plan: FftPlan::new(points)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn period(&self) -> f64 {
        self.spacing * self.points as f64
    }

    /// Highest representable frequency, `1 / (2h)`.
    pub fn nyquist(&self) -> f64 {
        0.5 / self.spacing
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        (j as f64 - (self.points / 2) as f64) * self.spacing
    }

    pub fn frequency(&self, k: usize) -> f64 {
        (k as f64 - (self.points / 2) as f64) / self.period()
    }

    pub fn unflatten(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        for axis in (0..self.dim).rev() {
            idx[axis] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx[..self.dim]
            .iter()
            .fold(0, |acc, &i| acc * self.points + i)
    }

    /// Spatial point of sample `flat`.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.unflatten(flat);
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            x[axis] = self.coordinate(idx[axis]);
        }
        x
    }

    /// Frequency of spectrum bin `flat`.
    pub fn frequency_point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.unflatten(flat);
        let mut xi = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            xi[axis] = self.frequency(idx[axis]);
        }
        xi
    }

    /// Exact number of samples in `value`, if `value` is an integer multiple of `unit`.
    pub(crate) fn steps(value: f64, unit: f64) -> Option<i64> {
        let q = value / unit;
        let r = q.round();
        if (q - r).abs() <= 1e-9 * q.abs().max(1.0) {
            Some(r as i64)
        } else {
            None
        }
    }

    pub fn sample(&self, f: impl Fn(&[f64]) -> C64) -> SampledFunction {
        let values = (0..self.len())
            .map(|flat| f(&self.point(flat)[..self.dim]))
            .collect();
        SampledFunction {
            grid: self.clone(),
            values,
        }
    }

    pub fn zeros(&self) -> SampledFunction {
        SampledFunction {
            grid: self.clone(),
            values: vec![C64::new(0.0, 0.0); self.len()],
        }
    }

    pub fn from_values(&self, values: Vec<C64>) -> Result<SampledFunction> {
        if values.len() != self.len() {
            return Err(invalid("sample count does not match the grid"));
        }
        Ok(SampledFunction {
            grid: self.clone(),
            values,
        })
    }

    /// `(-1)^(sum of indices)` sign that recentres FFT output.
    fn checkerboard(&self, flat: usize) -> f64 {
        let idx = self.unflatten(flat);
        let s: usize = idx[..self.dim].iter().sum();
        if s.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Continuous-transform samples `F f(xi_k)` from samples `f(x_j)`.
    pub fn forward(&self, samples: &[C64]) -> Vec<C64> {
        let mut buf: Vec<C64> = samples
            .iter()
            .enumerate()
            .map(|(j, v)| v * self.checkerboard(j))
            .collect();
        transform_cube(&self.plan, &mut buf, self.dim, false);
        let half_sign: f64 = if (self.points / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        let global = self.spacing.powi(self.dim as i32) * half_sign.powi(self.dim as i32);
        for (k, v) in buf.iter_mut().enumerate() {
            *v *= global * self.checkerboard(k);
        }
        buf
    }

    /// Inverse of [`forward`](Self::forward).
    pub fn inverse(&self, spectrum: &[C64]) -> Vec<C64> {
        let mut buf: Vec<C64> = spectrum
            .iter()
            .enumerate()
            .map(|(k, v)| v * self.checkerboard(k))
            .collect();
        transform_cube(&self.plan, &mut buf, self.dim, true);
        let half_sign: f64 = if (self.points / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        let global = self.period().recip().powi(self.dim as i32) * half_sign.powi(self.dim as i32);
        for (j, v) in buf.iter_mut().enumerate() {
            *v *= global * self.checkerboard(j);
        }
        buf
    }

    /// Rejects frequencies whose spectrum (of half-width `radius`) would
    /// cross the Nyquist band.
    pub fn check_band(&self, xi: &[f64], radius: f64) -> Result<()> {
        let nyquist = self.nyquist();
        for &f in xi.iter().take(self.dim) {
            if f.abs() + radius >= nyquist {
                return Err(Error::FrequencyAliasing {
                    frequency: f,
                    nyquist,
                });
            }
        }
        Ok(())
    }
}

/// Samples of a complex function on a [`SampledGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: SampledGrid,
    values: Vec<C64>,
}

impl SampledFunction {
    pub fn grid(&self) -> &SampledGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    fn cell(&self) -> f64 {
        self.grid.spacing.powi(self.grid.dim as i32)
    }

    /// `<self, other> = int self * conj(other)`.
    pub fn inner(&self, other: &SampledFunction) -> C64 {
        let sum: C64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        sum * self.cell()
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell()).sqrt()
    }

    pub fn scale(&self, s: C64) -> SampledFunction {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &SampledFunction) -> SampledFunction {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &SampledFunction) -> SampledFunction {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    /// `||self - reference|| / ||reference||`.
    pub fn relative_error(&self, reference: &SampledFunction) -> f64 {
        let r = reference.norm();
        let e = self.sub(reference).norm();
        if r == 0.0 {
            e
        } else {
            e / r
        }
    }

    pub fn max_abs_diff(&self, other: &SampledFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Circular shift by whole samples: `out(x) = self(x - steps*h)`.
    pub fn shifted(&self, steps: &[i64]) -> SampledFunction {
        let n = self.grid.points as i64;
        let mut out = vec![C64::new(0.0, 0.0); self.values.len()];
        for (flat, slot) in out.iter_mut().enumerate() {
            let idx = self.grid.unflatten(flat);
            let mut src = [0usize; MAX_DIM];
            for axis in 0..self.grid.dim {
                src[axis] = (idx[axis] as i64 - steps[axis]).rem_euclid(n) as usize;
            }
            *slot = self.values[self.grid.flatten(&src)];
        }
        SampledFunction {
            grid: self.grid.clone(),
            values: out,
        }
    }

    pub fn spectrum(&self) -> Vec<C64> {
        self.grid.forward(&self.values)
    }

    /// Fraction of the squared L2 norm carried by samples within `fraction`
    /// of the period from the boundary on any axis.
    pub fn edge_mass_fraction(&self, fraction: f64) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let limit = self.grid.period() * (0.5 - fraction);
        let edge: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|(flat, _)| {
                let x = self.grid.point(*flat);
                x[..self.grid.dim].iter().any(|c| c.abs() > limit)
            })
            .map(|(_, v)| v.norm_sqr())
            .sum();
        edge / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let grid = SampledGrid::new(1, 256, 16.0).unwrap();
        let f = grid.sample(|x| C64::new((-PI * x[0] * x[0]).exp(), 0.0));
        let spec = f.spectrum();
        for (k, v) in spec.iter().enumerate() {
            let xi = grid.frequency(k);
            assert!((v - C64::new((-PI * xi * xi).exp(), 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn shifted_gaussian_phase_in_two_dimensions() {
        let grid = SampledGrid::new(2, 128, 10.0).unwrap();
        let a = [0.75, -1.5];
        let f = grid.sample(|x| {
            let r2 = (x[0] - a[0]).powi(2) + (x[1] - a[1]).powi(2);
            C64::new((-PI * r2).exp(), 0.0)
        });
        let spec = f.spectrum();
        for k in (0..grid.len()).step_by(37) {
            let xi = grid.frequency_point(k);
            let expected = C64::from_polar(
                (-PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp(),
                -2.0 * PI * (a[0] * xi[0] + a[1] * xi[1]),
            );
            assert!((spec[k] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let grid = SampledGrid::new(2, 16, 4.0).unwrap();
        let f = grid.sample(|x| C64::new(x[0].sin() + x[1], x[0] * x[1]));
        let back = grid.inverse(&f.spectrum());
        for (a, b) in f.values().iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn odd_half_length_grid() {
        // n/2 odd exercises the global sign
        let grid = SampledGrid::new(1, 2, 1.0).unwrap();
        let f = grid.from_values(vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)]).unwrap();
        let back = grid.inverse(&f.spectrum());
        assert!((back[0] - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((back[1] - C64::new(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(SampledGrid::new(1, 100, 10.0).is_err());
        assert!(SampledGrid::new(0, 64, 10.0).is_err());
        assert!(SampledGrid::new(1, 64, -1.0).is_err());
    }
}
