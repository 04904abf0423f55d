//! Sampling check of the refined Hadamard–Petrowsky condition
//! `Im tau >= -C (1 + |Im zeta|)^nu` over the roots `tau` of `P(i tau, zeta) = 0`.

use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::operator::EvolutionOperator;
use crate::error::{invalid, Result};
use crate::fit::linear_regression;
use crate::quasi::Halton;
use crate::{par, C64, MAX_DIM};

/// Sample cloud for `zeta = a + i b in C^d`, `|a_j| <= re_max`, `|b_j| <= im_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HpSampler {
    pub re_max: f64,
    pub im_max: f64,
    pub samples: usize,
    /// Offset into the Halton sequence.
    pub seed: u64,
    /// Number of `|Im zeta|` bins for the exponent regression.
    pub bins: usize,
}

impl Default for HpSampler {
    fn default() -> Self {
        HpSampler {
            re_max: 20.0,
            im_max: 10.0,
            samples: 2000,
            seed: 0,
            bins: 24,
        }
    }
}

/// Worst sampled root, relative to the candidate bound.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HpWorst {
    pub zeta_re: Vec<f64>,
    pub zeta_im: Vec<f64>,
    pub tau_re: f64,
    pub tau_im: f64,
    /// `Im tau + C (1 + |Im zeta|)^nu`; negative means the candidate fails here.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HpReport {
    pub nu_estimate: f64,
    pub c_estimate: f64,
    pub candidate_c: f64,
    pub candidate_nu: f64,
    pub pass: bool,
    pub worst: HpWorst,
    pub samples_used: usize,
    /// Samples with a positive deficiency `max(0, -min Im tau)`.
    pub deficient_samples: usize,
    pub regression_r2: f64,
}

struct Sample {
    zeta: [C64; MAX_DIM],
    im_norm: f64,
    /// Root with the smallest imaginary part.
    tau: C64,
}

/// Samples the roots of `P(i tau, zeta)`, tests the candidate `(C, nu)` and
/// estimates the smallest admissible `nu`.
///
/// The exponent estimate bins the samples by `|Im zeta| >= 1`, keeps the
/// largest deficiency per bin and regresses its logarithm on `ln |Im zeta|`.
/// Using the bin maxima tracks the worst case the condition is about; the
/// plain logarithm avoids the bias that `ln(1 + |Im zeta|)` has on a window
/// of moderate `|Im zeta|`.
pub fn hp_check(
    op: &EvolutionOperator,
    candidate_c: f64,
    candidate_nu: f64,
    sampler: &HpSampler,
) -> Result<HpReport> {
    if !(candidate_c > 0.0) || !(candidate_nu >= 0.0) {
        return Err(invalid("candidate C must be positive and nu nonnegative"));
    }
    if sampler.samples == 0 || !(sampler.re_max >= 0.0) || !(sampler.im_max > 0.0) || sampler.bins < 2 {
        return Err(invalid("sampler needs samples, a positive Im range and two or more bins"));
    }
    let d = op.dim();
    let points = Halton::new(2 * d, sampler.seed).take_points(sampler.samples);
    let results = par::map(points.len(), |i| -> Result<Sample> {
        let u = &points[i];
        let mut zeta = [C64::new(0.0, 0.0); MAX_DIM];
        for axis in 0..d {
            zeta[axis] = C64::new(
                sampler.re_max * (2.0 * u[axis] - 1.0),
                sampler.im_max * (2.0 * u[d + axis] - 1.0),
            );
        }
        let roots = op.time_roots(&zeta[..d])?;
        // s = i tau, so Im tau = -Re s
        let tau = roots
            .iter()
            .map(|s| C64::new(s.im, -s.re))
            .min_by(|a, b| a.im.total_cmp(&b.im))
            .expect("at least one root");
        let im_norm = zeta[..d].iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
        Ok(Sample { zeta, im_norm, tau })
    });
    let samples: Vec<Sample> = results.into_iter().collect::<Result<_>>()?;

    let margin = |s: &Sample| s.tau.im + candidate_c * (1.0 + s.im_norm).powf(candidate_nu);
    let worst = samples
        .iter()
        .min_by(|a, b| margin(a).total_cmp(&margin(b)))
        .expect("nonempty sample set");
    let pass = samples.iter().all(|s| margin(s) >= 0.0);

    let deficiency = |s: &Sample| (-s.tau.im).max(0.0);
    let deficient = samples.iter().filter(|s| deficiency(s) > 0.0).count();

    let top = sampler.im_max * (d as f64).sqrt();
    let mut bin_max = alloc::vec![0.0f64; sampler.bins];
    let mut bin_at = alloc::vec![0.0f64; sampler.bins];
    for s in &samples {
        if s.im_norm < 1.0 {
            continue;
        }
        let pos = ((s.im_norm - 1.0) / (top - 1.0) * sampler.bins as f64) as usize;
        let b = pos.min(sampler.bins - 1);
        if deficiency(s) > bin_max[b] {
            bin_max[b] = deficiency(s);
            bin_at[b] = s.im_norm;
        }
    }
    let (x, y): (Vec<f64>, Vec<f64>) = bin_max
        .iter()
        .zip(&bin_at)
        .filter(|(v, _)| **v > 0.0)
        .map(|(v, at)| (at.ln(), v.ln()))
        .unzip();
    let (slope, r2) = if x.len() >= 2 {
        linear_regression(&x, &y).map(|(_, b, r2)| (b, r2)).unwrap_or((1.0, 0.0))
    } else {
        (1.0, 1.0)
    };
    let nu_estimate = slope.max(1.0);
    let c_estimate = samples
        .iter()
        .map(|s| deficiency(s) / (1.0 + s.im_norm).powf(nu_estimate))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    Ok(HpReport {
        nu_estimate,
        c_estimate,
        candidate_c,
        candidate_nu,
        pass,
        worst: HpWorst {
            zeta_re: worst.zeta[..d].iter().map(|z| z.re).collect(),
            zeta_im: worst.zeta[..d].iter().map(|z| z.im).collect(),
            tau_re: worst.tau.re,
            tau_im: worst.tau.im,
            margin: margin(worst),
        },
        samples_used: samples.len(),
        deficient_samples: deficient,
        regression_r2: r2,
    })
}

/// Predicted regularity from the Hadamard–Petrowsky exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayClass {
    pub nu: f64,
    /// Gevrey index of `sigma(t, .)`: `1 - 1/nu`.
    pub s: f64,
    /// Gabor-matrix decay exponent: `min(2, nu / (nu - 1))`.
    pub r: f64,
}

pub fn decay_class(nu: f64) -> Result<DecayClass> {
    if !(nu >= 1.0) || !nu.is_finite() {
        return Err(invalid("decay classes need nu >= 1"));
    }
    let r = if nu == 1.0 { 2.0 } else { (nu / (nu - 1.0)).min(2.0) };
    Ok(DecayClass {
        nu,
        s: 1.0 - 1.0 / nu,
        r,
    })
}
