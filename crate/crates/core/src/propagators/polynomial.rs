use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::{C64, MAX_DIM};

/// `coeff * xi_1^{e_1} ... xi_d^{e_d}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Monomial {
    pub exponents: [u32; MAX_DIM],
    pub coeff: C64,
}

/// Polynomial in `xi in R^d` (or `zeta in C^d`) with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Polynomial {
    dim: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn constant(dim: usize, c: C64) -> Self {
        let mut p = Self::zero(dim);
        p.push(&[0; MAX_DIM][..dim], c).expect("constant term");
        p
    }

    /// `4 pi^2 |xi|^2`, the symbol of `-Laplacian`.
    pub fn neg_laplacian(dim: usize) -> Self {
        let mut p = Self::zero(dim);
        for axis in 0..dim {
            let mut e = [0u32; MAX_DIM];
            e[axis] = 2;
            p.push(&e[..dim], C64::new(4.0 * PI * PI, 0.0)).expect("valid term");
        }
        p
    }

    /// Adds `coeff * xi^exponents`, merging equal exponents.
    pub fn push(&mut self, exponents: &[u32], coeff: C64) -> Result<()> {
        if exponents.len() != self.dim {
            return Err(invalid("monomial exponent count must equal the dimension"));
        }
        if !(coeff.re.is_finite() && coeff.im.is_finite()) {
            return Err(invalid("monomial coefficient must be finite"));
        }
        let mut e = [0u32; MAX_DIM];
        e[..self.dim].copy_from_slice(exponents);
        if let Some(t) = self.terms.iter_mut().find(|t| t.exponents == e) {
            t.coeff += coeff;
        } else {
            self.terms.push(Monomial { exponents: e, coeff });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == C64::new(0.0, 0.0))
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|t| t.coeff != C64::new(0.0, 0.0))
            .map(|t| t.exponents.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for a in &self.terms {
            for b in &other.terms {
                let mut e = [0u32; MAX_DIM];
                for axis in 0..self.dim {
                    e[axis] = a.exponents[axis] + b.exponents[axis];
                }
                out.push(&e[..self.dim], a.coeff * b.coeff).expect("finite product");
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.dim, C64::new(1.0, 0.0)), |acc, _| acc.mul(self))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for t in &other.terms {
            out.push(&t.exponents[..self.dim], t.coeff).expect("finite sum");
        }
        out
    }

    pub fn eval(&self, zeta: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|t| {
                (0..self.dim).fold(t.coeff, |acc, axis| acc * zeta[axis].powu(t.exponents[axis]))
            })
            .sum()
    }

    pub fn eval_real(&self, xi: &[f64]) -> C64 {
        self.terms
            .iter()
            .map(|t| {
                let p: f64 = (0..self.dim)
                    .map(|axis| powu(xi[axis], t.exponents[axis]))
                    .product();
                t.coeff * p
            })
            .sum()
    }
}

fn powu(x: f64, e: u32) -> f64 {
    (0..e).fold(1.0, |acc, _| acc * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_symbol() {
        let p = Polynomial::neg_laplacian(2);
        let v = p.eval_real(&[0.5, -1.0]);
        assert!((v.re - 4.0 * PI * PI * 1.25).abs() < 1e-12 && v.im == 0.0);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn powers_expand_correctly() {
        let p = Polynomial::neg_laplacian(2).pow(2);
        assert_eq!(p.degree(), 4);
        assert_eq!(p.terms().len(), 3);
        let xi = [0.3, 0.7];
        let base = Polynomial::neg_laplacian(2).eval_real(&xi);
        assert!((p.eval_real(&xi) - base * base).norm() < 1e-9);
        let z = [C64::new(0.3, 1.0), C64::new(-0.2, 0.5)];
        let bz = Polynomial::neg_laplacian(2).eval(&z);
        assert!((p.eval(&z) - bz * bz).norm() < 1e-9);
    }

    #[test]
    fn rejects_bad_terms() {
        let mut p = Polynomial::zero(2);
        assert!(p.push(&[1], C64::new(1.0, 0.0)).is_err());
        assert!(p.push(&[1, 0], C64::new(f64::NAN, 0.0)).is_err());
    }
}
