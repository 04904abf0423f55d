use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::phase_space::PhaseSpacePoint;
use crate::{C64, MAX_DIM};

/// Separable lattice `alpha Z^d x beta Z^d`, enumerated over the box
/// `max(|m|_inf, |n|_inf) <= box_radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Lattice {
    dim: usize,
    alpha: f64,
    beta: f64,
    box_radius: usize,
}

/// Integer lattice coordinates `(m, n)`; the phase-space point is
/// `(alpha m, beta n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LatticeIndex {
    pub m: [i64; MAX_DIM],
    pub n: [i64; MAX_DIM],
}

impl LatticeIndex {
    pub fn new(m: &[i64], n: &[i64]) -> Self {
        let mut idx = LatticeIndex {
            m: [0; MAX_DIM],
            n: [0; MAX_DIM],
        };
        idx.m[..m.len()].copy_from_slice(m);
        idx.n[..n.len()].copy_from_slice(n);
        idx
    }

    /// Max-norm over both halves.
    pub fn max_norm(&self, dim: usize) -> i64 {
        self.m[..dim]
            .iter()
            .chain(&self.n[..dim])
            .map(|v| v.abs())
            .max()
            .unwrap_or(0)
    }
}

impl Lattice {
    pub fn new(dim: usize, alpha: f64, beta: f64, box_radius: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid("lattice dimension must be between 1 and 4"));
        }
        if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(invalid("lattice steps must be positive"));
        }
        if box_radius == 0 {
            return Err(invalid("box radius must be positive"));
        }
        Ok(Lattice {
            dim,
            alpha,
            beta,
            box_radius,
        })
    }

    /// `Z^d x (1/2) Z^d`.
    pub fn standard(dim: usize, box_radius: usize) -> Result<Self> {
        Self::new(dim, 1.0, 0.5, box_radius)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn box_radius(&self) -> usize {
        self.box_radius
    }

    pub fn density(&self) -> f64 {
        (self.alpha * self.beta).powi(self.dim as i32).recip()
    }

    /// Number of index values per axis, `2R + 1`.
    pub fn side(&self) -> usize {
        2 * self.box_radius + 1
    }

    /// Number of points in one half (`m` or `n`) of the box.
    pub fn cells(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    /// Number of enumerated lattice points, `(2R+1)^{2d}`.
    pub fn len(&self) -> usize {
        self.cells() * self.cells()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat position of a half-index with entries in `[-R, R]`.
    pub fn flat_cell(&self, v: &[i64]) -> Option<usize> {
        let r = self.box_radius as i64;
        let mut flat = 0usize;
        for &c in &v[..self.dim] {
            if c.abs() > r {
                return None;
            }
            flat = flat * self.side() + (c + r) as usize;
        }
        Some(flat)
    }

    pub fn cell(&self, mut flat: usize) -> [i64; MAX_DIM] {
        let mut v = [0; MAX_DIM];
        let r = self.box_radius as i64;
        for axis in (0..self.dim).rev() {
            v[axis] = (flat % self.side()) as i64 - r;
            flat /= self.side();
        }
        v
    }

    pub fn flat_index(&self, idx: &LatticeIndex) -> Option<usize> {
        Some(self.flat_cell(&idx.m)? * self.cells() + self.flat_cell(&idx.n)?)
    }

    pub fn index(&self, flat: usize) -> LatticeIndex {
        LatticeIndex {
            m: self.cell(flat / self.cells()),
            n: self.cell(flat % self.cells()),
        }
    }

    /// All enumerated indices, `m` major.
    pub fn indices(&self) -> impl Iterator<Item = LatticeIndex> + '_ {
        (0..self.len()).map(move |f| self.index(f))
    }

    pub fn point(&self, idx: &LatticeIndex) -> PhaseSpacePoint {
        let mut x = [0.0; MAX_DIM];
        let mut xi = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            x[axis] = self.alpha * idx.m[axis] as f64;
            xi[axis] = self.beta * idx.n[axis] as f64;
        }
        PhaseSpacePoint::new(&x[..self.dim], &xi[..self.dim])
            .expect("lattice points are finite")
    }

    /// Largest `|beta n|` in the box.
    pub fn max_frequency(&self) -> f64 {
        self.beta * self.box_radius as f64
    }

    /// Largest `|alpha m|` in the box.
    pub fn max_position(&self) -> f64 {
        self.alpha * self.box_radius as f64
    }
}

/// Complex coefficients over the enumerated lattice box.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientArray {
    lattice: Lattice,
    values: Vec<C64>,
}

impl CoefficientArray {
    pub fn zeros(lattice: &Lattice) -> Self {
        CoefficientArray {
            lattice: *lattice,
            values: vec![C64::new(0.0, 0.0); lattice.len()],
        }
    }

    /// Unit coefficient at `idx`.
    pub fn delta(lattice: &Lattice, idx: &LatticeIndex) -> Result<Self> {
        let mut c = Self::zeros(lattice);
        c.set(idx, C64::new(1.0, 0.0))?;
        Ok(c)
    }

    pub fn from_values(lattice: &Lattice, values: Vec<C64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(invalid("coefficient count does not match the lattice box"));
        }
        Ok(CoefficientArray {
            lattice: *lattice,
            values,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    /// Zero outside the box.
    pub fn get(&self, idx: &LatticeIndex) -> C64 {
        self.lattice
            .flat_index(idx)
            .map_or(C64::new(0.0, 0.0), |f| self.values[f])
    }

    pub fn set(&mut self, idx: &LatticeIndex, value: C64) -> Result<()> {
        let flat = self
            .lattice
            .flat_index(idx)
            .ok_or_else(|| invalid("lattice index outside the box"))?;
        self.values[flat] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (LatticeIndex, C64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(f, v)| (self.lattice.index(f), *v))
    }

    /// `sum |c|^2`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn add_assign(&mut self, other: &CoefficientArray) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    pub fn scale(&mut self, s: C64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    /// Squared mass on the outer shell `max-norm == R`, relative to the total.
    pub fn boundary_fraction(&self) -> f64 {
        let total = self.energy();
        if total == 0.0 {
            return 0.0;
        }
        let r = self.lattice.box_radius as i64;
        let dim = self.lattice.dim;
        let edge: f64 = self
            .iter()
            .filter(|(i, _)| i.max_norm(dim) == r)
            .map(|(_, v)| v.norm_sqr())
            .sum();
        edge / total
    }
}
