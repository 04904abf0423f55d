//! JSON operator descriptions:
//! `{"m": 2, "d": 1, "a": [{"k": 2, "monomials": [{"exponents": [2], "re": 39.48, "im": 0}]}]}`
//! describes `d_t^m + sum_k a_k(D) d_t^{m-k}` with `a_k(xi) = sum re+i im xi^exponents`.
//! `k = 0` may be listed only as the constant 1.

use std::path::Path;

use gaborprop::propagators::{EvolutionOperator, Polynomial};
use gaborprop::{Complex64, MAX_DIM};
use serde::Deserialize;

use crate::failure::Failure;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorSpec {
    m: usize,
    d: usize,
    a: Vec<CoefficientSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientSpec {
    k: usize,
    monomials: Vec<MonomialSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MonomialSpec {
    exponents: Vec<u32>,
    re: f64,
    #[serde(default)]
    im: f64,
}

pub fn parse(text: &str) -> Result<EvolutionOperator, Failure> {
    let spec: OperatorSpec =
        serde_json::from_str(text).map_err(|e| Failure::config(format!("operator description: {e}")))?;
    if spec.d == 0 || spec.d > MAX_DIM {
        return Err(Failure::config(format!("operator dimension d must be between 1 and {MAX_DIM}")));
    }
    if spec.m == 0 {
        return Err(Failure::config("operator order m must be at least 1"));
    }
    let mut leading: Option<Polynomial> = None;
    let mut coefficients = vec![Polynomial::zero(spec.d); spec.m];
    for c in &spec.a {
        if c.k > spec.m {
            return Err(Failure::config(format!("coefficient index k = {} exceeds the order m = {}", c.k, spec.m)));
        }
        let target = if c.k == 0 {
            leading.get_or_insert_with(|| Polynomial::zero(spec.d))
        } else {
            &mut coefficients[c.k - 1]
        };
        for mono in &c.monomials {
            if mono.exponents.len() != spec.d {
                return Err(Failure::config(format!(
                    "monomial in a_{} has {} exponents, expected d = {}",
                    c.k,
                    mono.exponents.len(),
                    spec.d
                )));
            }
            target.push(&mono.exponents, Complex64::new(mono.re, mono.im))?;
        }
    }
    let op = match leading {
        Some(lead) => EvolutionOperator::with_leading(spec.d, &lead, coefficients)?,
        None => EvolutionOperator::new(spec.d, coefficients)?,
    };
    Ok(op)
}

pub fn load(path: &Path) -> Result<EvolutionOperator, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    parse(&text).map_err(|f| match f {
        Failure::Config(msg) => Failure::config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
