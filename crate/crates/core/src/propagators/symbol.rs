use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::operator::EvolutionOperator;
use crate::error::{invalid, Error, Result};
use crate::C64;

/// Propagator families with closed-form symbols, plus the generic case.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SymbolKind {
    Wave,
    KleinGordon { mass: f64 },
    Heat,
    PolyHeat { k: u32 },
    Generic(EvolutionOperator),
}

/// The propagator symbol `sigma(t, xi)` of an evolution operator: the
/// solution of the Fourier-side ODE with `sigma = ... = sigma^{(m-2)} = 0`
/// and `sigma^{(m-1)} = 1` at `t = 0+`, and zero for `t < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSymbol {
    kind: SymbolKind,
    operator: EvolutionOperator,
}

/// A symbol value together with the flag for the causal-zero branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValue {
    pub value: C64,
    /// Set when `t < 0`, where the symbol vanishes by convention.
    pub causal_zero: bool,
}

impl MultiplierSymbol {
    pub fn new(kind: SymbolKind, dim: usize) -> Result<Self> {
        let operator = match &kind {
            SymbolKind::Wave => EvolutionOperator::wave(dim)?,
            SymbolKind::KleinGordon { mass } => EvolutionOperator::klein_gordon(dim, *mass)?,
            SymbolKind::Heat => EvolutionOperator::heat(dim)?,
            SymbolKind::PolyHeat { k } => EvolutionOperator::poly_heat(dim, *k)?,
            SymbolKind::Generic(op) => {
                if op.dim() != dim {
                    return Err(invalid("operator dimension differs from the requested one"));
                }
                op.clone()
            }
        };
        Ok(MultiplierSymbol { kind, operator })
    }

    pub fn wave(dim: usize) -> Result<Self> {
        Self::new(SymbolKind::Wave, dim)
    }

    pub fn heat(dim: usize) -> Result<Self> {
        Self::new(SymbolKind::Heat, dim)
    }

    pub fn klein_gordon(dim: usize, mass: f64) -> Result<Self> {
        Self::new(SymbolKind::KleinGordon { mass }, dim)
    }

    pub fn poly_heat(dim: usize, k: u32) -> Result<Self> {
        Self::new(SymbolKind::PolyHeat { k }, dim)
    }

    pub fn generic(operator: EvolutionOperator) -> Self {
        MultiplierSymbol {
            kind: SymbolKind::Generic(operator.clone()),
            operator,
        }
    }

    /// The same operator evaluated through the companion exponential.
    pub fn as_generic(&self) -> Self {
        Self::generic(self.operator.clone())
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn operator(&self) -> &EvolutionOperator {
        &self.operator
    }

    pub fn order(&self) -> usize {
        self.operator.order()
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            SymbolKind::Wave => "wave",
            SymbolKind::KleinGordon { .. } => "klein_gordon",
            SymbolKind::Heat => "heat",
            SymbolKind::PolyHeat { .. } => "poly_heat",
            SymbolKind::Generic(_) => "generic",
        }
    }

    /// `true` when `sigma(t, .)` is real and even, which makes its Gabor
    /// matrix Hermitian.
    pub fn is_real_even(&self) -> bool {
        !matches!(self.kind, SymbolKind::Generic(_))
    }

    pub fn eval(&self, t: f64, xi: &[f64]) -> Result<SymbolValue> {
        if t < 0.0 {
            return Ok(SymbolValue {
                value: C64::new(0.0, 0.0),
                causal_zero: true,
            });
        }
        let value = self.time_derivatives(t, xi, 0)?[0];
        Ok(SymbolValue {
            value,
            causal_zero: false,
        })
    }

    /// `d_t^k sigma(t, xi)` for `k = 0..=min(k_max, m-1)`.
    pub fn time_derivatives(&self, t: f64, xi: &[f64], k_max: usize) -> Result<Vec<C64>> {
        if !t.is_finite() || xi.len() < self.dim() {
            return Err(invalid("symbol needs a finite time and a full frequency point"));
        }
        let count = k_max.min(self.order() - 1) + 1;
        if t < 0.0 {
            return Ok(vec![C64::new(0.0, 0.0); count]);
        }
        let xi2: f64 = xi[..self.dim()].iter().map(|v| v * v).sum();
        let out = match self.kind {
            SymbolKind::Wave => oscillator(t, 2.0 * PI * xi2.sqrt(), count),
            SymbolKind::KleinGordon { mass } => {
                oscillator(t, (4.0 * PI * PI * xi2 + mass * mass).sqrt(), count)
            }
            SymbolKind::Heat => vec![C64::new((-4.0 * PI * PI * xi2 * t).exp(), 0.0)],
            SymbolKind::PolyHeat { k } => {
                vec![C64::new((-(4.0 * PI * PI * xi2).powi(k as i32) * t).exp(), 0.0)]
            }
            SymbolKind::Generic(_) => return companion_derivatives(&self.operator, t, xi, count),
        };
        if out.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::SymbolOverflow { t });
        }
        Ok(out)
    }
}

/// `sin(w t)/w` and `cos(w t)`, with the removable singularity at `w t = 0`
/// handled by the sinc series.
fn oscillator(t: f64, w: f64, count: usize) -> Vec<C64> {
    let x = w * t;
    let sinc = if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    };
    let mut out = vec![C64::new(t * sinc, 0.0)];
    if count > 1 {
        out.push(C64::new(x.cos(), 0.0));
    }
    out
}

fn companion_derivatives(
    op: &EvolutionOperator,
    t: f64,
    xi: &[f64],
    count: usize,
) -> Result<Vec<C64>> {
    let m = op.order();
    let c = op.companion_real(xi).scale(C64::new(t, 0.0));
    let e = c.expm().map_err(|_| Error::SymbolOverflow { t })?;
    let out: Vec<C64> = (0..count).map(|k| e[(k, m - 1)]).collect();
    if out.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::SymbolOverflow { t });
    }
    Ok(out)
}

/// Free-function form of [`MultiplierSymbol::eval`].
pub fn symbol_eval(symbol: &MultiplierSymbol, t: f64, xi: &[f64]) -> Result<SymbolValue> {
    symbol.eval(t, xi)
}

/// Free-function form of [`MultiplierSymbol::time_derivatives`].
pub fn symbol_time_derivatives(
    symbol: &MultiplierSymbol,
    t: f64,
    xi: &[f64],
    k_max: usize,
) -> Result<Vec<C64>> {
    symbol.time_derivatives(t, xi, k_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagators::Polynomial;

    #[test]
    fn heat_at_zero_frequency() {
        let s = MultiplierSymbol::heat(2).unwrap();
        for t in [0.0, 0.3, 5.0] {
            assert_eq!(s.eval(t, &[0.0, 0.0]).unwrap().value, C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn wave_reference_value() {
        let s = MultiplierSymbol::wave(1).unwrap();
        let v = s.eval(0.75, &[0.5]).unwrap().value.re;
        assert!((v - (0.75 * PI).sin() / PI).abs() < 1e-15);
        assert!((v - 0.225079).abs() < 1e-6);
    }

    #[test]
    fn wave_small_argument_branch_is_continuous() {
        let s = MultiplierSymbol::wave(1).unwrap();
        let t = 0.7;
        for xi in [1e-6, 2.2e-5, 2.3e-5, 1e-3] {
            let direct = (2.0 * PI * xi * t).sin() / (2.0 * PI * xi);
            assert!((s.eval(t, &[xi]).unwrap().value.re - direct).abs() < 1e-15);
        }
        assert_eq!(s.eval(t, &[0.0]).unwrap().value.re, t);
    }

    #[test]
    fn generic_matches_closed_forms() {
        for s in [
            MultiplierSymbol::wave(1).unwrap(),
            MultiplierSymbol::klein_gordon(1, 1.0).unwrap(),
            MultiplierSymbol::heat(1).unwrap(),
            MultiplierSymbol::poly_heat(1, 2).unwrap(),
        ] {
            let g = s.as_generic();
            for i in 0..40 {
                let t = 0.05 * i as f64;
                let xi = -1.5 + 0.077 * i as f64;
                let a = s.time_derivatives(t, &[xi], 1).unwrap();
                let b = g.time_derivatives(t, &[xi], 1).unwrap();
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).norm() < 1e-10, "{} t={t} xi={xi}", s.name());
                }
            }
        }
    }

    #[test]
    fn initial_conditions() {
        for s in [MultiplierSymbol::wave(1).unwrap(), MultiplierSymbol::heat(1).unwrap()] {
            for sym in [s.clone(), s.as_generic()] {
                let m = sym.order();
                let d = sym.time_derivatives(0.0, &[0.8], m - 1).unwrap();
                assert!((d[m - 1] - C64::new(1.0, 0.0)).norm() < 1e-14);
                for v in &d[..m - 1] {
                    assert!(v.norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn negative_time_is_causal_zero() {
        let s = MultiplierSymbol::wave(1).unwrap();
        let v = s.eval(-0.1, &[0.3]).unwrap();
        assert!(v.causal_zero && v.value == C64::new(0.0, 0.0));
        assert_eq!(s.time_derivatives(-1.0, &[0.3], 1).unwrap(), vec![C64::new(0.0, 0.0); 2]);
    }

    #[test]
    fn derivative_order_is_capped() {
        let s = MultiplierSymbol::heat(1).unwrap();
        assert_eq!(s.time_derivatives(0.2, &[0.1], 3).unwrap().len(), 1);
    }

    #[test]
    fn unstable_operator_overflows() {
        // d_t - 1e4 |xi|^2 grows like e^{1e4 t xi^2}
        let mut a = Polynomial::zero(1);
        a.push(&[2], C64::new(-1e4, 0.0)).unwrap();
        let s = MultiplierSymbol::generic(EvolutionOperator::new(1, vec![a]).unwrap());
        assert!(matches!(s.eval(10.0, &[3.0]), Err(Error::SymbolOverflow { .. })));
    }
}
