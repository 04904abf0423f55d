//! Cauchy problems `P(d_t, D) u = 0`, `d_t^k u(0) = u_k`, solved two ways: on
//! the Fourier side (the reference) and through thresholded Gabor matrices.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::frames::{analysis, dual_window, frame_bounds, synthesis, CoefficientArray, FrameBounds, Lattice, Window};
use crate::gabor_matrix::{assemble_derivative, AssemblyOptions, GaborMatrix, QuadratureConfig, SpectralWindow};
use crate::grid::{SampledFunction, SampledGrid};
use crate::propagators::MultiplierSymbol;
use crate::C64;

/// Largest admissible share of the data's L2 mass in the outer 5% of the grid.
pub const EDGE_TOLERANCE: f64 = 1e-10;
const EDGE_BAND: f64 = 0.05;

/// Coefficient mass on the box boundary above this share triggers a warning.
pub const SPILLOVER_TOLERANCE: f64 = 1e-6;

/// Initial data `u_0, ..., u_{m-1}` for an operator of order `m`.
#[derive(Debug, Clone)]
pub struct CauchyData {
    symbol: MultiplierSymbol,
    data: Vec<SampledFunction>,
}

impl CauchyData {
    pub fn new(symbol: MultiplierSymbol, data: Vec<SampledFunction>) -> Result<Self> {
        if data.len() != symbol.order() {
            return Err(invalid(format!(
                "an operator of order {} needs {} data functions, got {}",
                symbol.order(),
                symbol.order(),
                data.len()
            )));
        }
        let grid = data[0].grid();
        if grid.dim() != symbol.dim() {
            return Err(Error::GridMismatch("data and operator dimensions differ".into()));
        }
        if data.iter().any(|u| u.grid() != grid) {
            return Err(Error::GridMismatch("all data must share one grid".into()));
        }
        for u in &data {
            let edge = u.edge_mass_fraction(EDGE_BAND);
            if edge > EDGE_TOLERANCE {
                return Err(Error::DataNotLocalized { edge_fraction: edge });
            }
        }
        Ok(CauchyData { symbol, data })
    }

    pub fn symbol(&self) -> &MultiplierSymbol {
        &self.symbol
    }

    pub fn data(&self) -> &[SampledFunction] {
        &self.data
    }

    pub fn grid(&self) -> &SampledGrid {
        self.data[0].grid()
    }

    /// `alpha u + beta v` for data on the same operator and grid.
    pub fn combine(&self, alpha: C64, other: &CauchyData, beta: C64) -> Result<CauchyData> {
        if other.data.len() != self.data.len() || other.grid() != self.grid() {
            return Err(invalid("data sets are not compatible"));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(u, v)| u.scale(alpha).add(&v.scale(beta)))
            .collect();
        Ok(CauchyData {
            symbol: self.symbol.clone(),
            data,
        })
    }

    /// Spectrum of `u_{m-1-k} + sum_{j=1}^{m-k-1} a_j(D) u_{m-k-1-j}`, the
    /// datum that `d_t^k sigma(t, D)` acts on.
    fn combined_spectrum(&self, k: usize) -> Vec<C64> {
        let m = self.data.len();
        let grid = self.grid();
        let mut out = self.data[m - 1 - k].spectrum();
        for j in 1..m - k {
            let a = self.symbol.operator().coefficient(j);
            let u = self.data[m - k - 1 - j].spectrum();
            for (flat, (o, v)) in out.iter_mut().zip(u).enumerate() {
                *o += a.eval_real(&grid.frequency_point(flat)[..grid.dim()]) * v;
            }
        }
        out
    }

    /// The combined datum for `d_t^k sigma`, in space.
    pub fn combined(&self, k: usize) -> Result<SampledFunction> {
        if k >= self.data.len() {
            return Err(invalid("combined datum index exceeds the operator order"));
        }
        self.grid().from_values(self.grid().inverse(&self.combined_spectrum(k)))
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid("solutions are computed for finite t >= 0"));
    }
    Ok(())
}

/// `u(t)` by multiplying transforms with `d_t^k sigma(t, xi)`.
pub fn propagate_fourier(data: &CauchyData, t: f64) -> Result<SampledFunction> {
    check_time(t)?;
    let grid = data.grid();
    let d = grid.dim();
    let m = data.data.len();
    let combined: Vec<Vec<C64>> = (0..m).map(|k| data.combined_spectrum(k)).collect();
    let mut spectrum = alloc::vec![C64::new(0.0, 0.0); grid.len()];
    for (flat, slot) in spectrum.iter_mut().enumerate() {
        let xi = grid.frequency_point(flat);
        let derivs = data.symbol.time_derivatives(t, &xi[..d], m - 1)?;
        for k in 0..m {
            *slot += derivs[k] * combined[k][flat];
        }
    }
    grid.from_values(grid.inverse(&spectrum))
}

/// Window, dual window and frame bounds for one lattice on one grid.
#[derive(Debug, Clone)]
pub struct GaborSetup {
    pub lattice: Lattice,
    pub window: SampledFunction,
    pub dual: SampledFunction,
    pub bounds: FrameBounds,
    pub window_label: String,
    pub quadrature: QuadratureConfig,
}

impl GaborSetup {
    pub fn new(window: &Window, lattice: &Lattice, grid: &SampledGrid) -> Result<Self> {
        let g = window.sample(grid)?;
        let bounds = frame_bounds(&g, lattice)?;
        let dual = dual_window(&g, lattice)?;
        Ok(GaborSetup {
            lattice: *lattice,
            window: g,
            dual,
            bounds,
            window_label: window.label(),
            quadrature: QuadratureConfig::default(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum SolveMethod {
    GaborSparse { theta: f64 },
    FourierOracle,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub t: f64,
    pub method: SolveMethod,
    pub solution: SampledFunction,
    /// Stored entries summed over the `m` matrices.
    pub nnz: usize,
    pub dense_size: usize,
    /// Relative L2 error against the Fourier solution, when it was computed.
    pub relative_error: Option<f64>,
    /// Sum of the moduli of dropped entries over all matrices.
    pub dropped_mass: f64,
    pub warnings: Vec<String>,
}

/// Dense Gabor matrices of `d_t^k sigma(t, D)` with the pair `(g, gamma)`,
/// the analysis coefficients of the combined data and the reference solution.
///
/// Built once per `(data, t)`; [`GaborPropagator::solve`] then thresholds and
/// applies for any `theta`.
#[derive(Debug, Clone)]
pub struct GaborPropagator {
    t: f64,
    setup: GaborSetup,
    matrices: Vec<GaborMatrix>,
    coefficients: Vec<CoefficientArray>,
    reference: SampledFunction,
    data_norm: f64,
    warnings: Vec<String>,
}

impl GaborPropagator {
    pub fn new(data: &CauchyData, t: f64, setup: &GaborSetup) -> Result<Self> {
        check_time(t)?;
        if setup.window.grid() != data.grid() {
            return Err(Error::GridMismatch("setup and data live on different grids".into()));
        }
        let m = data.data.len();
        let input = SpectralWindow::sampled(&setup.dual, "dual");
        let output = SpectralWindow::sampled(&setup.window, &setup.window_label);
        let options = AssemblyOptions {
            quadrature: setup.quadrature,
            ..AssemblyOptions::default()
        };
        let mut matrices = Vec::with_capacity(m);
        let mut coefficients = Vec::with_capacity(m);
        let mut warnings = Vec::new();
        let mut data_norm: f64 = 0.0;
        for k in 0..m {
            let combined = data.combined(k)?;
            data_norm = data_norm.max(combined.norm());
            let c = analysis(&combined, &setup.window, &setup.lattice)?;
            let spill = c.boundary_fraction();
            if spill > SPILLOVER_TOLERANCE {
                warnings.push(format!(
                    "combined datum {k}: {spill:e} of the coefficient mass sits on the box boundary"
                ));
            }
            coefficients.push(c);
            matrices.push(assemble_derivative(
                data.symbol(),
                t,
                k,
                &input,
                &output,
                &setup.lattice,
                &options,
            )?);
        }
        Ok(GaborPropagator {
            t,
            setup: setup.clone(),
            matrices,
            coefficients,
            reference: propagate_fourier(data, t)?,
            data_norm,
            warnings,
        })
    }

    pub fn reference(&self) -> &SampledFunction {
        &self.reference
    }

    pub fn matrices(&self) -> &[GaborMatrix] {
        &self.matrices
    }

    /// Largest L2 norm among the combined data.
    pub fn data_norm(&self) -> f64 {
        self.data_norm
    }

    /// Analysis, thresholded matrix product, synthesis with `g`.
    pub fn solve(&self, theta: f64) -> Result<SolveReport> {
        if !(theta >= 0.0) {
            return Err(invalid("threshold must be nonnegative"));
        }
        let mut total = CoefficientArray::zeros(&self.setup.lattice);
        let mut nnz = 0;
        let mut dropped = 0.0;
        let mut warnings = self.warnings.clone();
        for (k, (matrix, c)) in self.matrices.iter().zip(&self.coefficients).enumerate() {
            let sparse = if theta > 0.0 { matrix.thresholded(theta) } else { matrix.clone() };
            nnz += sparse.nnz();
            dropped += sparse.dropped_mass();
            let d = sparse.apply(c)?;
            let spill = d.boundary_fraction();
            if spill > SPILLOVER_TOLERANCE {
                warnings.push(format!(
                    "propagated coefficients {k}: {spill:e} of the mass sits on the box boundary"
                ));
            }
            total.add_assign(&d);
        }
        let solution = synthesis(&total, &self.setup.dual)?;
        let relative_error = solution.relative_error(&self.reference);
        Ok(SolveReport {
            t: self.t,
            method: SolveMethod::GaborSparse { theta },
            solution,
            nnz,
            dense_size: self.matrices.len() * self.setup.lattice.len() * self.setup.lattice.len(),
            relative_error: Some(relative_error),
            dropped_mass: dropped,
            warnings,
        })
    }

    /// Allowed growth of the relative error when thresholding at `theta`:
    /// `(B/A) theta N |data| / |u_ref|` summed over the `m` matrices, with
    /// `N` the number of lattice points in the box.
    pub fn threshold_error_bound(&self, theta: f64) -> f64 {
        let n = self.setup.lattice.len() as f64;
        let reference = self.reference.norm();
        if reference == 0.0 {
            return f64::INFINITY;
        }
        self.matrices.len() as f64 * self.setup.bounds.condition() * theta * n * self.data_norm / reference
    }
}

/// The reference solution wrapped as a report.
pub fn fourier_report(data: &CauchyData, t: f64) -> Result<SolveReport> {
    Ok(SolveReport {
        t,
        method: SolveMethod::FourierOracle,
        solution: propagate_fourier(data, t)?,
        nnz: 0,
        dense_size: 0,
        relative_error: None,
        dropped_mass: 0.0,
        warnings: Vec::new(),
    })
}

/// One Gabor solve at threshold `theta`, compared with the Fourier solution.
pub fn propagate_gabor(data: &CauchyData, t: f64, setup: &GaborSetup, theta: f64) -> Result<SolveReport> {
    GaborPropagator::new(data, t, setup)?.solve(theta)
}

/// One row of a threshold sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRow {
    pub theta: f64,
    pub nnz: usize,
    pub rel_l2_error: f64,
}

/// Error against nnz for a nonincreasing list of thresholds.
pub fn sparsity_error_curve(
    data: &CauchyData,
    t: f64,
    setup: &GaborSetup,
    thetas: &[f64],
) -> Result<Vec<SweepRow>> {
    if thetas.windows(2).any(|w| w[1] > w[0]) {
        return Err(invalid("thresholds must be given in nonincreasing order"));
    }
    let propagator = GaborPropagator::new(data, t, setup)?;
    thetas
        .iter()
        .map(|&theta| {
            let report = propagator.solve(theta)?;
            Ok(SweepRow {
                theta,
                nnz: report.nnz,
                rel_l2_error: report.relative_error.unwrap_or(f64::NAN),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn grid() -> SampledGrid {
        SampledGrid::new(1, 1024, 32.0).unwrap()
    }

    fn gaussian(grid: &SampledGrid, shift: f64) -> SampledFunction {
        grid.sample(|x| C64::new((-PI * (x[0] - shift).powi(2)).exp(), 0.0))
    }

    fn setup(grid: &SampledGrid) -> GaborSetup {
        GaborSetup::new(&Window::gaussian(1).unwrap(), &Lattice::standard(1, 6).unwrap(), grid).unwrap()
    }

    fn heat_data(grid: &SampledGrid) -> CauchyData {
        CauchyData::new(MultiplierSymbol::heat(1).unwrap(), alloc::vec![gaussian(grid, 0.0)]).unwrap()
    }

    #[test]
    fn time_zero_returns_the_data() {
        let g = grid();
        let heat = heat_data(&g);
        assert!(propagate_fourier(&heat, 0.0).unwrap().max_abs_diff(&heat.data()[0]) < 1e-12);
        let wave = CauchyData::new(
            MultiplierSymbol::wave(1).unwrap(),
            alloc::vec![gaussian(&g, 0.5), gaussian(&g, -1.0)],
        )
        .unwrap();
        assert!(propagate_fourier(&wave, 0.0).unwrap().max_abs_diff(&wave.data()[0]) < 1e-12);
    }

    #[test]
    fn heat_matches_space_domain_convolution() {
        // coarse direct quadrature of the heat kernel against the datum
        let t = 0.1;
        let g = SampledGrid::new(1, 256, 16.0).unwrap();
        let u = propagate_fourier(&heat_data(&g), t).unwrap();
        let h = g.spacing();
        for i in (0..256).step_by(7) {
            let x = g.coordinate(i);
            let direct: f64 = (0..256)
                .map(|j| {
                    let y = g.coordinate(j);
                    (-(x - y).powi(2) / (4.0 * t)).exp() / (4.0 * PI * t).sqrt() * (-PI * y * y).exp() * h
                })
                .sum();
            assert!((u.values()[i].re - direct).abs() < 1e-6);
            assert!(u.values()[i].im.abs() < 1e-12);
        }
    }

    #[test]
    fn wave_matches_dalembert() {
        let g = grid();
        let t = 0.5;
        let zero = g.zeros();
        let data = CauchyData::new(MultiplierSymbol::wave(1).unwrap(), alloc::vec![zero, gaussian(&g, 0.0)]).unwrap();
        let u = propagate_fourier(&data, t).unwrap();
        for i in (0..1024).step_by(13) {
            let x = g.coordinate(i);
            // Simpson rule for (1/2) int_{x-t}^{x+t} e^{-pi y^2} dy
            let n = 400;
            let step = 2.0 * t / n as f64;
            let f = |k: usize| (-PI * (x - t + k as f64 * step).powi(2)).exp();
            let mut s = f(0) + f(n);
            for k in 1..n {
                s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k);
            }
            let exact = 0.5 * s * step / 3.0;
            assert!((u.values()[i].re - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_gabor_matches_fourier_for_heat() {
        let g = grid();
        let report = propagate_gabor(&heat_data(&g), 0.1, &setup(&g), 0.0).unwrap();
        assert!(report.relative_error.unwrap() <= 1e-6);
        assert_eq!(report.nnz, report.dense_size);
    }

    #[test]
    fn thresholding_reduces_nnz_within_the_bound() {
        let g = grid();
        let p = GaborPropagator::new(&heat_data(&g), 0.1, &setup(&g)).unwrap();
        let dense = p.solve(0.0).unwrap();
        let sparse = p.solve(1e-6).unwrap();
        assert!(sparse.nnz < dense.nnz);
        let err = sparse.relative_error.unwrap();
        assert!(err <= 1e-3);
        assert!(err <= dense.relative_error.unwrap() + p.threshold_error_bound(1e-6));
    }

    #[test]
    fn time_zero_is_frame_reconstruction() {
        let g = grid();
        let s = setup(&g);
        let data = heat_data(&g);
        let report = propagate_gabor(&data, 0.0, &s, 0.0).unwrap();
        let rec = synthesis(&analysis(&data.data()[0], &s.window, &s.lattice).unwrap(), &s.dual).unwrap();
        assert!(report.solution.relative_error(&rec) < 1e-9);
        assert!(report.relative_error.unwrap() <= 1e-6);
    }

    #[test]
    fn sweep_is_monotone_and_deterministic() {
        let g = grid();
        let thetas = [1e-2, 1e-4, 1e-4, 1e-6, 1e-8, 1e-10];
        let rows = sparsity_error_curve(&heat_data(&g), 0.1, &setup(&g), &thetas).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].rel_l2_error <= w[0].rel_l2_error + 1e-12);
            assert!(w[1].nnz >= w[0].nnz);
        }
        assert_eq!(rows[1], rows[2]);
        let everything = sparsity_error_curve(&heat_data(&g), 0.1, &setup(&g), &[10.0]).unwrap();
        assert_eq!(everything[0].nnz, 0);
        assert!((everything[0].rel_l2_error - 1.0).abs() < 1e-15);
        assert!(sparsity_error_curve(&heat_data(&g), 0.1, &setup(&g), &[1e-6, 1e-2]).is_err());
    }

    #[test]
    fn both_methods_are_linear() {
        let g = grid();
        let s = setup(&g);
        let sym = MultiplierSymbol::klein_gordon(1, 1.0).unwrap();
        let u = CauchyData::new(sym.clone(), alloc::vec![gaussian(&g, 0.3), gaussian(&g, -0.2)]).unwrap();
        let v = CauchyData::new(sym, alloc::vec![gaussian(&g, -0.5), g.zeros()]).unwrap();
        let (a, b) = (C64::new(0.7, -0.2), C64::new(-1.3, 0.4));
        let w = u.combine(a, &v, b).unwrap();
        let t = 0.5;
        let lin = |f: &dyn Fn(&CauchyData) -> SampledFunction| {
            let lhs = f(&w);
            let rhs = f(&u).scale(a).add(&f(&v).scale(b));
            lhs.sub(&rhs).norm() / lhs.norm()
        };
        assert!(lin(&|d| propagate_fourier(d, t).unwrap()) < 1e-10);
        assert!(lin(&|d| propagate_gabor(d, t, &s, 1e-8).unwrap().solution) < 1e-10);
    }

    #[test]
    fn heat_is_a_semigroup() {
        let g = grid();
        let data = heat_data(&g);
        let once = propagate_fourier(&data, 0.35).unwrap();
        let half = propagate_fourier(&data, 0.15).unwrap();
        let twice = propagate_fourier(&CauchyData::new(data.symbol().clone(), alloc::vec![half]).unwrap(), 0.2).unwrap();
        assert!(once.relative_error(&twice) < 1e-8);
    }

    #[test]
    fn data_are_validated() {
        let g = grid();
        let heat = MultiplierSymbol::heat(1).unwrap();
        assert!(CauchyData::new(heat.clone(), alloc::vec![]).is_err());
        let edge = gaussian(&g, 15.5);
        assert!(matches!(
            CauchyData::new(heat.clone(), alloc::vec![edge]),
            Err(Error::DataNotLocalized { .. })
        ));
        assert!(propagate_fourier(&heat_data(&g), -1.0).is_err());
    }
}
