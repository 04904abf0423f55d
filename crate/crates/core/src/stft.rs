//! Sampled short-time Fourier transform `V_g f(x, xi) = <f, M_xi T_x g>` and
//! the decay fits used to read off Gevrey-type regularity.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::fit::{self, candidate_grid, DecayFit, DecayModel};
use crate::frames::Window;
use crate::grid::SampledFunction;
use crate::{par, C64, MAX_DIM};

/// STFT values on a phase-space grid, stored `x` major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceSamples {
    dim: usize,
    positions: Vec<[f64; MAX_DIM]>,
    frequencies: Vec<[f64; MAX_DIM]>,
    values: Vec<C64>,
    pub window: String,
    pub signal: String,
}

impl PhaseSpaceSamples {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn positions(&self) -> &[[f64; MAX_DIM]] {
        &self.positions
    }

    pub fn frequencies(&self) -> &[[f64; MAX_DIM]] {
        &self.frequencies
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn value(&self, x_index: usize, xi_index: usize) -> C64 {
        self.values[x_index * self.frequencies.len() + xi_index]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(x, xi, V)` triples.
    pub fn iter(&self) -> impl Iterator<Item = (&[f64], &[f64], C64)> + '_ {
        let nf = self.frequencies.len();
        self.values.iter().enumerate().map(move |(i, v)| {
            (
                &self.positions[i / nf][..self.dim],
                &self.frequencies[i % nf][..self.dim],
                *v,
            )
        })
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// STFT of `f` against the closed-form window, at every `stride`-th grid
/// point in space and frequency.
///
/// The outermost frequency bin (exactly at the Nyquist frequency) is
/// skipped, so all samples sit strictly inside the band.
pub fn stft(f: &SampledFunction, window: &Window, stride: usize) -> Result<PhaseSpaceSamples> {
    let grid = f.grid();
    if window.dim() != grid.dim() {
        return Err(Error::GridMismatch("window and grid dimensions differ".into()));
    }
    if stride == 0 || !grid.points().is_multiple_of(stride) {
        return Err(invalid("stride must divide the number of grid points"));
    }
    let d = grid.dim();
    let kept: Vec<usize> = (0..grid.len())
        .filter(|&flat| {
            let idx = grid.unflatten(flat);
            idx[..d].iter().all(|&i| i % stride == 0)
        })
        .collect();
    let freq_bins: Vec<usize> = kept
        .iter()
        .cloned()
        .filter(|&flat| grid.unflatten(flat)[..d].iter().all(|&i| i != 0))
        .collect();
    let positions: Vec<[f64; MAX_DIM]> = kept.iter().map(|&j| grid.point(j)).collect();
    let frequencies: Vec<[f64; MAX_DIM]> = freq_bins.iter().map(|&k| grid.frequency_point(k)).collect();
    let rows = par::map(positions.len(), |i| {
        let x0 = positions[i];
        let product: Vec<C64> = f
            .values()
            .iter()
            .enumerate()
            .map(|(flat, v)| {
                let y = grid.point(flat);
                let mut shifted = [0.0; MAX_DIM];
                for axis in 0..d {
                    shifted[axis] = y[axis] - x0[axis];
                }
                v * window.value(&shifted[..d])
            })
            .collect();
        let spectrum = grid.forward(&product);
        freq_bins.iter().map(|&k| spectrum[k]).collect::<Vec<_>>()
    });
    Ok(PhaseSpaceSamples {
        dim: d,
        positions,
        frequencies,
        values: rows.into_iter().flatten().collect(),
        window: window.label(),
        signal: String::new(),
    })
}

/// Fits `model` with its exponent fixed.
///
/// * `RadialExp` regresses every sample on `|z|^p`, `z = (x, xi)`.
/// * `FrequencyExp` first takes the upper envelope over `x` as a function of
///   `|xi|`, then regresses on `|xi|^{1/s}`.
/// * `SortedEntry` sorts the magnitudes and regresses on `n^q`, `n = 1, 2, ...`.
pub fn fit_decay(samples: &PhaseSpaceSamples, model: DecayModel, noise_floor: f64) -> Result<DecayFit> {
    let (rho, values) = reduce(samples, &model);
    fit::fit_model(&rho, &values, model, noise_floor)
}

fn reduce(samples: &PhaseSpaceSamples, model: &DecayModel) -> (Vec<f64>, Vec<f64>) {
    match model {
        DecayModel::RadialExp { .. } => samples
            .iter()
            .map(|(x, xi, v)| ((norm(x).powi(2) + norm(xi).powi(2)).sqrt(), v.norm()))
            .unzip(),
        DecayModel::FrequencyExp { .. } => {
            let pts: Vec<(f64, f64)> = samples.iter().map(|(_, xi, v)| (norm(xi), v.norm())).collect();
            fit::upper_envelope(&pts).into_iter().unzip()
        }
        DecayModel::SortedEntry { .. } => {
            let mut mags: Vec<f64> = samples.values.iter().map(|v| v.norm()).collect();
            mags.sort_by(|a, b| b.total_cmp(a));
            mags.iter().enumerate().map(|(i, v)| ((i + 1) as f64, *v)).unzip()
        }
    }
}

/// Candidate Gevrey indices `0.40, 0.45, ..., 1.50`.
pub fn gevrey_candidates() -> Vec<f64> {
    candidate_grid(0.4, 1.5, 0.05)
}

/// Frequency-decay fit with `s` chosen from the candidate grid by best `r2`.
/// The returned `exponent` is the estimated Gevrey index `s`.
pub fn fit_gevrey(samples: &PhaseSpaceSamples, candidates: &[f64], noise_floor: f64) -> Result<DecayFit> {
    let model = DecayModel::FrequencyExp { s: 1.0 };
    let (rho, values) = reduce(samples, &model);
    let powers: Vec<f64> = candidates.iter().map(|s| 1.0 / s).collect();
    fit::scan_model(&rho, &values, model, &powers, noise_floor)
}

/// `|V_g g(x, xi)|` for the standard Gaussian, `e^{-pi (|x|^2 + |xi|^2) / 2}`.
pub fn gaussian_stft_modulus(x: &[f64], xi: &[f64]) -> f64 {
    (-PI * (norm(x).powi(2) + norm(xi).powi(2)) / 2.0).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::NOISE_FLOOR;
    use crate::grid::SampledGrid;

    fn gaussian() -> (SampledFunction, Window) {
        let grid = SampledGrid::new(1, 256, 16.0).unwrap();
        let w = Window::gaussian(1).unwrap();
        (w.sample(&grid).unwrap(), w)
    }

    #[test]
    fn gaussian_stft_matches_closed_form() {
        let (g, w) = gaussian();
        let s = stft(&g, &w, 4).unwrap();
        for (x, xi, v) in s.iter() {
            assert!((v.norm() - gaussian_stft_modulus(x, xi)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_signal() {
        let (g, w) = gaussian();
        let s = stft(&g.grid().zeros(), &w, 8).unwrap();
        assert!(s.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn frequencies_stay_inside_the_band() {
        let (g, w) = gaussian();
        let s = stft(&g, &w, 2).unwrap();
        assert!(s.frequencies().iter().all(|xi| xi[0].abs() < g.grid().nyquist()));
        assert!(stft(&g, &w, 3).is_err());
    }

    #[test]
    fn radial_fit_of_gaussian_stft() {
        let (g, w) = gaussian();
        let s = stft(&g, &w, 4).unwrap();
        let fit = fit_decay(&s, DecayModel::RadialExp { p: 2.0 }, NOISE_FLOOR).unwrap();
        assert!((fit.epsilon - PI / 2.0).abs() < 1e-4, "{fit:?}");
        assert!(fit.r2 > 1.0 - 1e-8);
    }

    #[test]
    fn gevrey_index_of_gaussian() {
        let (g, w) = gaussian();
        let s = stft(&g, &w, 2).unwrap();
        let fit = fit_gevrey(&s, &gevrey_candidates(), NOISE_FLOOR).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-9);
    }

    #[test]
    fn sorted_entries_are_nonincreasing() {
        let (g, w) = gaussian();
        let s = stft(&g, &w, 4).unwrap();
        let (rho, v) = reduce(&s, &DecayModel::SortedEntry { q: 1.0 });
        assert_eq!(rho[0], 1.0);
        assert!(v.windows(2).all(|p| p[0] >= p[1]));
    }
}
