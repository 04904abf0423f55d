use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::matrix::{assemble_column, GaborMatrix};
use super::quadrature::QuadratureConfig;
use crate::error::{invalid, Result};
use crate::fit::{candidate_grid, fit_model, scan_model, upper_envelope, DecayFit, DecayModel};
use crate::frames::{Lattice, LatticeIndex, Window};
use crate::phase_space::PhaseSpacePoint;
use crate::propagators::MultiplierSymbol;

/// Floor below which matrix entries are treated as quadrature noise in decay fits.
pub const ENTRY_FLOOR: f64 = 1e-13;

/// Explicit bound on wave-propagator entries with the normalized Gaussian:
/// `t exp(-(pi/2)[|xi' - xi|^2 + (|x' - x| - t)_+^2])`.
///
/// Only stated for `d <= 3`; larger dimensions are rejected.
pub fn wave_bound(t: f64, z: &PhaseSpacePoint, z_prime: &PhaseSpacePoint) -> Result<f64> {
    if z.dim() != z_prime.dim() {
        return Err(invalid("phase-space points of different dimension"));
    }
    if z.dim() > 3 {
        return Err(invalid("the explicit wave bound is only available for d <= 3"));
    }
    let diff = z_prime.sub(z);
    let dx = diff.x().iter().map(|v| v * v).sum::<f64>().sqrt();
    let dxi2 = diff.xi().iter().map(|v| v * v).sum::<f64>();
    let cone = (dx - t.abs()).max(0.0);
    Ok(t.abs() * (-(PI / 2.0) * (dxi2 + cone * cone)).exp())
}

/// Column `lambda` of the bound matrix `T~`, in lattice row order.
pub fn bound_column(lattice: &Lattice, t: f64, column: &LatticeIndex) -> Result<Vec<f64>> {
    let z = lattice.point(column);
    lattice
        .indices()
        .map(|row| wave_bound(t, &z, &lattice.point(&row)))
        .collect()
}

/// Sorted column magnitudes with their fitted `C exp(-epsilon n^q)` law.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnDecay {
    /// Non-increasing rearrangement `|a|_1 >= |a|_2 >= ...`.
    pub sorted: Vec<f64>,
    pub fit: DecayFit,
}

/// Non-increasing rearrangement of `values`.
pub fn sorted_magnitudes(values: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted
}

/// Exponent `1/(2 d s)` of the sorted-entry law.
pub fn sorted_exponent(dim: usize, s: f64) -> Result<f64> {
    if !(s > 0.0) || dim == 0 {
        return Err(invalid("sorted-entry exponent needs s > 0 and d >= 1"));
    }
    Ok(1.0 / (2.0 * dim as f64 * s))
}

/// Rearranges `magnitudes` and fits `n -> C exp(-epsilon n^{1/(2ds)})`, `n = 1, 2, ...`.
pub fn column_decay(magnitudes: &[f64], dim: usize, s: f64, floor: f64) -> Result<ColumnDecay> {
    let q = sorted_exponent(dim, s)?;
    let sorted = sorted_magnitudes(magnitudes);
    let n: Vec<f64> = (1..=sorted.len()).map(|k| k as f64).collect();
    let fit = fit_model(&n, &sorted, DecayModel::SortedEntry { q }, floor)?;
    Ok(ColumnDecay { sorted, fit })
}

/// [`column_decay`] on column `lambda` of an assembled matrix.
pub fn matrix_column_decay(m: &GaborMatrix, column: &LatticeIndex, s: f64, floor: f64) -> Result<ColumnDecay> {
    if m.lattice().flat_index(column).is_none() {
        return Err(invalid("column index outside the lattice box"));
    }
    let mags: Vec<f64> = m.column(column).iter().map(|(_, v)| v.norm()).collect();
    column_decay(&mags, m.lattice().dim(), s, floor)
}

/// Default candidates for the off-diagonal exponent: `1.00, 1.01, ..., 3.00`.
pub fn offdiag_candidates() -> Vec<f64> {
    candidate_grid(1.0, 3.0, 0.01)
}

/// `(distance, |entry|)` for every stored kernel value, with the Euclidean
/// phase-space distance `sqrt(|alpha dm|^2 + |beta (n' - n)|^2)`.
pub fn offdiag_samples(m: &GaborMatrix) -> Vec<(f64, f64)> {
    let lattice = m.lattice();
    let d = lattice.dim();
    m.kernel_entries()
        .map(|(dm, n_in, n_out, k)| {
            let mut r2 = 0.0;
            for a in 0..d {
                let x = lattice.alpha() * dm[a] as f64;
                let xi = lattice.beta() * (n_out[a] - n_in[a]) as f64;
                r2 += x * x + xi * xi;
            }
            (r2.sqrt(), k.norm())
        })
        .collect()
}

/// Result of the off-diagonal decay scan.
#[derive(Debug, Clone, PartialEq)]
pub struct OffdiagFit {
    /// Best fit of `C exp(-epsilon |lambda' - lambda|^r)`; `exponent` is `r`.
    pub fit: DecayFit,
    /// Exponent predicted from the operator's decay class, when supplied.
    pub theory: Option<f64>,
}

impl OffdiagFit {
    pub fn r(&self) -> f64 {
        self.fit.exponent
    }
}

/// Fits `|entry| ~ C exp(-epsilon |lambda' - lambda|^r)` for each candidate `r`
/// and keeps the best coefficient of determination.
///
/// Each kernel value stands for a whole diagonal of the matrix, and the
/// fit runs on the upper envelope of the `(distance, modulus)` cloud, which
/// is the profile the decay bound constrains.
pub fn offdiag_fit(
    m: &GaborMatrix,
    candidates: &[f64],
    floor: f64,
    theory: Option<f64>,
) -> Result<OffdiagFit> {
    if m.threshold() > 1e-12 {
        return Err(invalid("off-diagonal fits need a dense matrix or a threshold <= 1e-12"));
    }
    let env = upper_envelope(&offdiag_samples(m));
    let (rho, vals): (Vec<f64>, Vec<f64>) = env.into_iter().filter(|(r, _)| *r > 0.0).unzip();
    let fit = scan_model(&rho, &vals, DecayModel::RadialExp { p: 1.0 }, candidates, floor)?;
    Ok(OffdiagFit { fit, theory })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FigureKind {
    /// Sorted column of the wave bound matrix.
    Fig1Wave,
    /// Sorted `(0, 0)` column of the heat propagator at several times.
    Fig2Heat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureParams {
    pub dim: usize,
    pub box_radius: usize,
    pub times: Vec<f64>,
    /// Also emit the assembled wave column next to the bound (fig1 only).
    pub include_assembled: bool,
    pub quadrature: QuadratureConfig,
}

impl FigureParams {
    pub fn defaults(kind: FigureKind) -> Self {
        let times = match kind {
            FigureKind::Fig1Wave => alloc::vec![0.75],
            FigureKind::Fig2Heat => alloc::vec![0.0, 0.25, 0.75, 1.5],
        };
        FigureParams {
            dim: 2,
            box_radius: 10,
            times,
            include_assembled: false,
            quadrature: QuadratureConfig::default(),
        }
    }
}

/// One curve of a figure.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureSeries {
    pub t: f64,
    /// `"bound"` or `"assembled"`.
    pub source: String,
    pub sorted: Vec<f64>,
    /// Sorted-entry fit with `q = 1/2`, when the curve has enough dynamic range.
    pub fit: Option<DecayFit>,
}

impl FigureSeries {
    /// Rows `(n, |a|_n, t)` with `n` starting at 1.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.sorted.iter().enumerate().map(move |(i, v)| (i + 1, *v, self.t))
    }
}

fn series(t: f64, source: &str, magnitudes: &[f64], dim: usize) -> FigureSeries {
    let sorted = sorted_magnitudes(magnitudes);
    let fit = column_decay(&sorted, dim, 0.5, crate::fit::NOISE_FLOOR).ok().map(|c| c.fit);
    FigureSeries {
        t,
        source: String::from(source),
        sorted,
        fit,
    }
}

/// Sorted `(0, 0)` columns for the two figures on `Z^d x (1/2) Z^d`.
pub fn figure_data(kind: FigureKind, params: &FigureParams) -> Result<Vec<FigureSeries>> {
    let lattice = Lattice::standard(params.dim, params.box_radius)?;
    let origin = LatticeIndex::new(&[0; 4][..params.dim], &[0; 4][..params.dim]);
    let window = Window::gaussian(params.dim)?;
    let mut out = Vec::new();
    for &t in &params.times {
        match kind {
            FigureKind::Fig1Wave => {
                out.push(series(t, "bound", &bound_column(&lattice, t, &origin)?, params.dim));
                if params.include_assembled {
                    let col = assemble_column(
                        &MultiplierSymbol::wave(params.dim)?,
                        t,
                        &window,
                        &lattice,
                        &origin,
                        &params.quadrature,
                    )?;
                    let mags: Vec<f64> = col.values.iter().map(|v| v.norm()).collect();
                    out.push(series(t, "assembled", &mags, params.dim));
                }
            }
            FigureKind::Fig2Heat => {
                let col = assemble_column(
                    &MultiplierSymbol::heat(params.dim)?,
                    t,
                    &window,
                    &lattice,
                    &origin,
                    &params.quadrature,
                )?;
                let mags: Vec<f64> = col.values.iter().map(|v| v.norm()).collect();
                out.push(series(t, "assembled", &mags, params.dim));
            }
        }
    }
    Ok(out)
}
