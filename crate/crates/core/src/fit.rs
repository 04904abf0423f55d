//! Decay-law fits in the log-magnitude domain.
//!
//! Every model is `|v| ~ C exp(-epsilon rho^p)` for some radius-like variable
//! `rho`; fitting one is a straight-line regression of `ln|v|` on `rho^p`.

use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Error, Result};

/// Minimum number of samples above the floor for a fit.
pub const MIN_SAMPLES: usize = 16;

/// Default noise floor for fits.
pub const NOISE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum DecayModel {
    /// `C exp(-epsilon |z|^p)`
    RadialExp { p: f64 },
    /// `C exp(-epsilon |xi|^{1/s})`
    FrequencyExp { s: f64 },
    /// `C exp(-epsilon n^q)` over sorted entries
    SortedEntry { q: f64 },
}

impl DecayModel {
    /// Power applied to the radius variable.
    pub fn power(&self) -> f64 {
        match *self {
            DecayModel::RadialExp { p } => p,
            DecayModel::FrequencyExp { s } => 1.0 / s,
            DecayModel::SortedEntry { q } => q,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DecayModel::RadialExp { .. } => "radial_exp",
            DecayModel::FrequencyExp { .. } => "frequency_exp",
            DecayModel::SortedEntry { .. } => "sorted_entry",
        }
    }

    fn with_power(&self, power: f64) -> Self {
        match self {
            DecayModel::RadialExp { .. } => DecayModel::RadialExp { p: power },
            DecayModel::FrequencyExp { .. } => DecayModel::FrequencyExp { s: 1.0 / power },
            DecayModel::SortedEntry { .. } => DecayModel::SortedEntry { q: power },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayFit {
    pub model: DecayModel,
    #[cfg_attr(feature = "serde", serde(rename = "C"))]
    pub c: f64,
    pub epsilon: f64,
    /// The model's own exponent parameter (`p`, `s` or `q`).
    pub exponent: f64,
    pub r2: f64,
    /// Smallest and largest radius used.
    pub fit_range: (f64, f64),
    pub samples: usize,
}

impl DecayFit {
    pub fn predict(&self, rho: f64) -> f64 {
        self.c * (-self.epsilon * rho.powf(self.model.power())).exp()
    }
}

/// Least-squares line `y = a + b x` with its coefficient of determination.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(invalid("regression needs two or more paired samples"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx <= 0.0 {
        return Err(invalid("regression abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - intercept - slope * a;
            e * e
        })
        .sum();
    let r2 = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok((intercept, slope, r2))
}

fn above_floor(rho: &[f64], values: &[f64], floor: f64) -> (Vec<f64>, Vec<f64>) {
    rho.iter()
        .zip(values)
        .filter(|(r, v)| v.is_finite() && **v > floor && r.is_finite() && **r >= 0.0)
        .map(|(r, v)| (*r, *v))
        .unzip()
}

/// Fits `model` with its exponent held fixed.
pub fn fit_model(rho: &[f64], values: &[f64], model: DecayModel, floor: f64) -> Result<DecayFit> {
    if rho.len() != values.len() {
        return Err(invalid("radius and value arrays differ in length"));
    }
    let (r, v) = above_floor(rho, values, floor);
    if r.len() < MIN_SAMPLES {
        return Err(Error::InsufficientDynamicRange {
            available: r.len(),
            required: MIN_SAMPLES,
        });
    }
    let power = model.power();
    let x: Vec<f64> = r.iter().map(|v| v.powf(power)).collect();
    let y: Vec<f64> = v.iter().map(|v| v.ln()).collect();
    let (a, b, r2) = linear_regression(&x, &y)?;
    let epsilon = -b;
    if !(epsilon > 0.0) {
        return Err(Error::NotDecaying { epsilon });
    }
    let lo = r.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exponent = match model {
        DecayModel::RadialExp { p } => p,
        DecayModel::FrequencyExp { s } => s,
        DecayModel::SortedEntry { q } => q,
    };
    Ok(DecayFit {
        model,
        c: a.exp(),
        epsilon,
        exponent,
        r2,
        fit_range: (lo, hi),
        samples: r.len(),
    })
}

/// Fits `model` for each candidate power and keeps the best `r2`.
pub fn scan_model(
    rho: &[f64],
    values: &[f64],
    model: DecayModel,
    powers: &[f64],
    floor: f64,
) -> Result<DecayFit> {
    let mut best: Option<DecayFit> = None;
    let mut first_err = None;
    for &power in powers {
        match fit_model(rho, values, model.with_power(power), floor) {
            Ok(fit) => {
                if best.is_none_or(|b| fit.r2 > b.r2) {
                    best = Some(fit);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.unwrap_or_else(|| invalid("no candidate exponents")))
}

/// `start, start+step, ...` up to `stop` inclusive.
pub fn candidate_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| start + i as f64 * step).collect()
}

/// Upper envelope of scattered `(radius, value)` data.
///
/// Values are first reduced to the maximum per distinct radius (radii within
/// `1e-9` relative are merged); then only radii whose maximum dominates every
/// larger radius are kept. The result is sorted by radius and is
/// non-increasing, which is the shape a decay bound has to control.
pub fn upper_envelope(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .cloned()
        .filter(|(r, v)| r.is_finite() && v.is_finite())
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (r, v) in pts {
        match merged.last_mut() {
            Some(last) if (r - last.0).abs() <= 1e-9 * r.abs().max(1.0) => {
                last.1 = last.1.max(v);
            }
            _ => merged.push((r, v)),
        }
    }
    let mut tail = f64::NEG_INFINITY;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &(r, v) in merged.iter().rev() {
        if v >= tail {
            out.push((r, v));
            tail = v;
        }
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(c0: f64, eps: f64, p: f64) -> (Vec<f64>, Vec<f64>) {
        let rho: Vec<f64> = (0..60).map(|i| 0.1 * i as f64).collect();
        let v = rho.iter().map(|r| c0 * (-eps * r.powf(p)).exp()).collect();
        (rho, v)
    }

    #[test]
    fn recovers_exact_parameters() {
        let (rho, v) = synthetic(2.5, 0.8, 2.0);
        let fit = fit_model(&rho, &v, DecayModel::RadialExp { p: 2.0 }, NOISE_FLOOR).unwrap();
        assert!((fit.c - 2.5).abs() < 1e-6);
        assert!((fit.epsilon - 0.8).abs() < 1e-6);
        assert!(fit.r2 >= 1.0 - 1e-12);
        assert!((fit.predict(1.0) - 2.5 * (-0.8f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn scan_finds_generating_exponent() {
        let (rho, v) = synthetic(1.0, 0.3, 1.5);
        let fit = scan_model(
            &rho,
            &v,
            DecayModel::RadialExp { p: 1.0 },
            &candidate_grid(1.0, 3.0, 0.05),
            NOISE_FLOOR,
        )
        .unwrap();
        assert!((fit.exponent - 1.5).abs() < 1e-9);
    }

    #[test]
    fn frequency_model_exponent_is_s() {
        let rho: Vec<f64> = (1..40).map(|i| 0.25 * i as f64).collect();
        let v: Vec<f64> = rho.iter().map(|r| (-0.5 * r * r).exp()).collect();
        let fit = scan_model(
            &rho,
            &v,
            DecayModel::FrequencyExp { s: 1.0 },
            &candidate_grid(0.4, 1.5, 0.05).iter().map(|s| 1.0 / s).collect::<Vec<_>>(),
            NOISE_FLOOR,
        )
        .unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-9);
    }

    #[test]
    fn floor_and_sign_checks() {
        let rho: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let v = vec![1.0; 10];
        assert!(matches!(
            fit_model(&rho, &v, DecayModel::RadialExp { p: 1.0 }, NOISE_FLOOR),
            Err(Error::InsufficientDynamicRange { available: 10, .. })
        ));
        let rho: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let v: Vec<f64> = rho.iter().map(|r| (0.1 * r).exp()).collect();
        assert!(matches!(
            fit_model(&rho, &v, DecayModel::RadialExp { p: 1.0 }, NOISE_FLOOR),
            Err(Error::NotDecaying { .. })
        ));
    }

    #[test]
    fn envelope_is_monotone_and_dominating() {
        let pts = [(0.0, 1.0), (1.0, 0.2), (1.0, 0.5), (2.0, 0.6), (3.0, 0.1), (4.0, 0.05)];
        let env = upper_envelope(&pts);
        assert_eq!(env, vec![(0.0, 1.0), (2.0, 0.6), (3.0, 0.1), (4.0, 0.05)]);
    }

    #[test]
    fn candidate_grid_endpoints() {
        let g = candidate_grid(0.4, 1.5, 0.05);
        assert_eq!(g.len(), 23);
        assert!((g[22] - 1.5).abs() < 1e-12);
    }
}
