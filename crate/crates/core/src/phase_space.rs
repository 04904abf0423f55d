//! Points `z = (x, xi)` of phase space `R^d x R^d`.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::MAX_DIM;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseSpacePoint {
    dim: usize,
    x: [f64; MAX_DIM],
    xi: [f64; MAX_DIM],
}

impl PhaseSpacePoint {
    pub fn new(x: &[f64], xi: &[f64]) -> Result<Self> {
        if x.len() != xi.len() || x.is_empty() || x.len() > MAX_DIM {
            return Err(invalid("phase-space point needs matching x and xi of dimension 1..=4"));
        }
        if x.iter().chain(xi).any(|v| !v.is_finite()) {
            return Err(invalid("phase-space coordinates must be finite"));
        }
        let mut p = PhaseSpacePoint {
            dim: x.len(),
            x: [0.0; MAX_DIM],
            xi: [0.0; MAX_DIM],
        };
        p.x[..x.len()].copy_from_slice(x);
        p.xi[..xi.len()].copy_from_slice(xi);
        Ok(p)
    }

    pub fn origin(dim: usize) -> Self {
        PhaseSpacePoint {
            dim: dim.clamp(1, MAX_DIM),
            x: [0.0; MAX_DIM],
            xi: [0.0; MAX_DIM],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x(&self) -> &[f64] {
        &self.x[..self.dim]
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi[..self.dim]
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            out.x[i] -= other.x[i];
            out.xi[i] -= other.xi[i];
        }
        out
    }

    pub fn neg(&self) -> Self {
        PhaseSpacePoint::origin(self.dim).sub(self)
    }

    /// Euclidean norm on `R^{2d}`.
    pub fn norm(&self) -> f64 {
        self.x()
            .iter()
            .chain(self.xi())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Symplectic rotation `j(z1, z2) = (z2, -z1)`.
    pub fn rotate(&self) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            out.x[i] = self.xi[i];
            out.xi[i] = -self.x[i];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_of_unit_vector() {
        let z = PhaseSpacePoint::new(&[1.0], &[0.0]).unwrap();
        let j = z.rotate();
        assert_eq!(j.x(), &[0.0]);
        assert_eq!(j.xi(), &[-1.0]);
    }

    #[test]
    fn rotation_squares_to_minus_identity() {
        let z = PhaseSpacePoint::new(&[0.3, -2.0], &[1.5, 4.0]).unwrap();
        assert_eq!(z.rotate().rotate(), z.neg());
    }

    #[test]
    fn rotation_is_an_isometry() {
        let z = PhaseSpacePoint::new(&[0.3, -2.0, 1.0], &[1.5, 4.0, -0.25]).unwrap();
        let w = PhaseSpacePoint::new(&[1.0, 1.0, 1.0], &[0.0, 2.0, 3.0]).unwrap();
        let d = w.sub(&z);
        assert!((d.rotate().norm() - d.norm()).abs() < 1e-15);
    }

    #[test]
    fn rejects_mismatched_lengths() {
        assert!(PhaseSpacePoint::new(&[1.0], &[1.0, 2.0]).is_err());
        assert!(PhaseSpacePoint::new(&[f64::NAN], &[1.0]).is_err());
    }
}
