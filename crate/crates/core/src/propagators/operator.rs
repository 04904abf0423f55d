use alloc::vec::Vec;

use super::polynomial::Polynomial;
use crate::error::{invalid, Error, Result};
use crate::linalg::CMatrix;
use crate::{C64, MAX_DIM};

/// `P(d_t, D_x) = d_t^m + sum_{k=1}^m a_k(D_x) d_t^{m-k}`, where `a_k(xi)` is
/// the Fourier symbol of the spatial coefficient (so `-Laplacian` has
/// symbol `4 pi^2 |xi|^2`).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvolutionOperator {
    dim: usize,
    coefficients: Vec<Polynomial>,
}

impl EvolutionOperator {
    /// `coefficients[k-1]` is `a_k`. The leading coefficient is implicitly 1.
    pub fn new(dim: usize, coefficients: Vec<Polynomial>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid("operator dimension must be between 1 and 4"));
        }
        if coefficients.is_empty() {
            return Err(invalid("operator order must be at least 1"));
        }
        if coefficients.iter().any(|p| p.dim() != dim) {
            return Err(invalid("coefficient polynomials must share the operator dimension"));
        }
        Ok(EvolutionOperator { dim, coefficients })
    }

    /// Accepts an explicit leading coefficient `a_0(xi)`, which must be the
    /// constant 1.
    pub fn with_leading(dim: usize, leading: &Polynomial, rest: Vec<Polynomial>) -> Result<Self> {
        let one = Polynomial::constant(dim, C64::new(1.0, 0.0));
        if leading.dim() != dim || !leading.sub_is_zero(&one) {
            return Err(Error::DegenerateLeading(
                "the coefficient of the highest time derivative must be 1".into(),
            ));
        }
        Self::new(dim, rest)
    }

    /// `d_t^2 - Laplacian`.
    pub fn wave(dim: usize) -> Result<Self> {
        Self::new(dim, alloc::vec![Polynomial::zero(dim), Polynomial::neg_laplacian(dim)])
    }

    /// `d_t^2 - Laplacian + mass^2`.
    pub fn klein_gordon(dim: usize, mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(invalid("Klein-Gordon mass must be positive"));
        }
        let a2 = Polynomial::neg_laplacian(dim).add(&Polynomial::constant(dim, C64::new(mass * mass, 0.0)));
        Self::new(dim, alloc::vec![Polynomial::zero(dim), a2])
    }

    /// `d_t - Laplacian`.
    pub fn heat(dim: usize) -> Result<Self> {
        Self::poly_heat(dim, 1)
    }

    /// `d_t + (-Laplacian)^k`.
    pub fn poly_heat(dim: usize, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(invalid("poly-heat power must be at least 1"));
        }
        Self::new(dim, alloc::vec![Polynomial::neg_laplacian(dim).pow(k)])
    }

    /// `d_t`.
    pub fn time_derivative(dim: usize) -> Result<Self> {
        Self::new(dim, alloc::vec![Polynomial::zero(dim)])
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `a_k` for `k = 1..=m`.
    pub fn coefficient(&self, k: usize) -> &Polynomial {
        &self.coefficients[k - 1]
    }

    pub fn coefficients(&self) -> &[Polynomial] {
        &self.coefficients
    }

    /// Companion matrix of `s^m + sum a_k(zeta) s^{m-k}` acting on the state
    /// `(y, y', ..., y^{(m-1)})`.
    pub fn companion(&self, zeta: &[C64]) -> CMatrix {
        let m = self.order();
        let a: Vec<C64> = self.coefficients.iter().map(|p| p.eval(zeta)).collect();
        CMatrix::from_fn(m, |i, j| {
            if i + 1 < m {
                if j == i + 1 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            } else {
                -a[m - 1 - j]
            }
        })
    }

    /// Companion matrix at a real frequency.
    pub fn companion_real(&self, xi: &[f64]) -> CMatrix {
        let z: Vec<C64> = xi.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.companion(&z)
    }

    /// Roots `s` of `s^m + sum a_k(zeta) s^{m-k}`.
    pub fn time_roots(&self, zeta: &[C64]) -> Result<Vec<C64>> {
        let c = self.companion(zeta);
        if self.order() == 1 {
            return Ok(alloc::vec![c[(0, 0)]]);
        }
        // the transpose of a companion matrix is upper Hessenberg
        c.transpose().hessenberg_eigenvalues()
    }
}

impl Polynomial {
    fn sub_is_zero(&self, other: &Polynomial) -> bool {
        self.add(&other.scaled(C64::new(-1.0, 0.0))).is_zero()
    }

    pub(crate) fn scaled(&self, s: C64) -> Polynomial {
        let mut out = Polynomial::zero(self.dim());
        for t in self.terms() {
            out.push(&t.exponents[..self.dim()], t.coeff * s).expect("finite");
        }
        out
    }
}
