use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::lattice::{CoefficientArray, Lattice, LatticeIndex};
use super::window::Window;
use crate::error::{Error, Result};
use crate::grid::{SampledFunction, SampledGrid};
use crate::phase_space::PhaseSpacePoint;
use crate::{par, C64, MAX_DIM};

/// Exact step sizes of a lattice on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSteps {
    /// Samples per space step `alpha`.
    pub space: i64,
    /// Spectrum bins per frequency step `beta`.
    pub frequency: i64,
}

/// Checks that `alpha` is a multiple of the spacing, `beta` a multiple of
/// `1/L`, and that the lattice box stays strictly inside the Nyquist band.
pub fn grid_steps(lattice: &Lattice, grid: &SampledGrid) -> Result<GridSteps> {
    if lattice.dim() != grid.dim() {
        return Err(Error::GridMismatch("lattice and grid dimensions differ".into()));
    }
    let space = SampledGrid::steps(lattice.alpha(), grid.spacing())
        .filter(|&s| s > 0)
        .ok_or_else(|| {
            Error::GridMismatch(alloc::format!(
                "alpha = {} is not a multiple of the grid spacing {}",
                lattice.alpha(),
                grid.spacing()
            ))
        })?;
    let frequency = SampledGrid::steps(lattice.beta(), grid.period().recip())
        .filter(|&s| s > 0)
        .ok_or_else(|| {
            Error::GridMismatch(alloc::format!(
                "beta = {} is not a multiple of 1/L = {}",
                lattice.beta(),
                grid.period().recip()
            ))
        })?;
    let top = lattice.max_frequency();
    if top >= grid.nyquist() {
        return Err(Error::FrequencyAliasing {
            frequency: top,
            nyquist: grid.nyquist(),
        });
    }
    Ok(GridSteps { space, frequency })
}

/// Samples of `M_xi T_x g` for the closed-form window `g`.
pub fn time_frequency_shift(
    window: &Window,
    z: &PhaseSpacePoint,
    grid: &SampledGrid,
) -> Result<SampledFunction> {
    if window.dim() != grid.dim() || z.dim() != grid.dim() {
        return Err(Error::GridMismatch("dimensions of window, point and grid differ".into()));
    }
    grid.check_band(z.xi(), 0.0)?;
    let d = grid.dim();
    Ok(grid.sample(|x| {
        let mut shifted = [0.0; MAX_DIM];
        let mut phase = 0.0;
        for axis in 0..d {
            shifted[axis] = x[axis] - z.x()[axis];
            phase += z.xi()[axis] * x[axis];
        }
        C64::from_polar(window.value(&shifted[..d]), 2.0 * PI * phase)
    }))
}

/// `pi(lambda) g` for a sampled window, using exact grid shifts.
pub fn shift_sampled(
    g: &SampledFunction,
    lattice: &Lattice,
    idx: &LatticeIndex,
) -> Result<SampledFunction> {
    let steps = grid_steps(lattice, g.grid())?;
    let point = lattice.point(idx);
    g.grid().check_band(point.xi(), 0.0)?;
    let mut shift = [0i64; MAX_DIM];
    for (s, m) in shift.iter_mut().zip(&idx.m) {
        *s = m * steps.space;
    }
    let mut out = g.shifted(&shift);
    let grid = out.grid().clone();
    let d = grid.dim();
    for (flat, v) in out.values_mut().iter_mut().enumerate() {
        let x = grid.point(flat);
        let phase: f64 = (0..d).map(|a| point.xi()[a] * x[a]).sum();
        *v *= C64::from_polar(1.0, 2.0 * PI * phase);
    }
    Ok(out)
}

fn check_window(f: &SampledFunction, g: &SampledFunction) -> Result<()> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch("signal and window live on different grids".into()));
    }
    Ok(())
}

/// Flat spectrum bins of every `n` in the box.
fn channel_bins(lattice: &Lattice, grid: &SampledGrid, steps: GridSteps) -> Vec<usize> {
    let half = (grid.points() / 2) as i64;
    (0..lattice.cells())
        .map(|flat| {
            let n = lattice.cell(flat);
            let mut bin = [0usize; MAX_DIM];
            for axis in 0..lattice.dim() {
                bin[axis] = (n[axis] * steps.frequency + half) as usize;
            }
            grid.flatten(&bin)
        })
        .collect()
}

fn space_shift(lattice: &Lattice, steps: GridSteps, m_flat: usize) -> [i64; MAX_DIM] {
    let m = lattice.cell(m_flat);
    let mut shift = [0i64; MAX_DIM];
    for axis in 0..lattice.dim() {
        shift[axis] = m[axis] * steps.space;
    }
    shift
}

/// Gabor coefficients `<f, pi(lambda) g>` over the lattice box.
///
/// Each space slice `m` is one FFT of `f * conj(T_{alpha m} g)`.
pub fn analysis(
    f: &SampledFunction,
    g: &SampledFunction,
    lattice: &Lattice,
) -> Result<CoefficientArray> {
    check_window(f, g)?;
    let grid = f.grid();
    let steps = grid_steps(lattice, grid)?;
    let bins = channel_bins(lattice, grid, steps);
    let slices = par::map(lattice.cells(), |m_flat| {
        let tg = g.shifted(&space_shift(lattice, steps, m_flat));
        let product: Vec<C64> = f
            .values()
            .iter()
            .zip(tg.values())
            .map(|(a, b)| a * b.conj())
            .collect();
        let spectrum = grid.forward(&product);
        bins.iter().map(|&b| spectrum[b]).collect::<Vec<_>>()
    });
    CoefficientArray::from_values(lattice, slices.into_iter().flatten().collect())
}

/// Closed-form-window convenience wrapper around [`analysis`].
pub fn analysis_with(
    f: &SampledFunction,
    window: &Window,
    lattice: &Lattice,
) -> Result<CoefficientArray> {
    let g = window.sample(f.grid())?;
    analysis(f, &g, lattice)
}

/// `sum_lambda c_lambda pi(lambda) gamma`.
pub fn synthesis(c: &CoefficientArray, gamma: &SampledFunction) -> Result<SampledFunction> {
    let lattice = c.lattice();
    let grid = gamma.grid();
    let steps = grid_steps(lattice, grid)?;
    let bins = channel_bins(lattice, grid, steps);
    let volume = grid.period().powi(grid.dim() as i32);
    let cells = lattice.cells();
    let parts = par::map(cells, |m_flat| {
        let row = &c.values()[m_flat * cells..(m_flat + 1) * cells];
        if row.iter().all(|v| *v == C64::new(0.0, 0.0)) {
            return None;
        }
        let mut spectrum = vec![C64::new(0.0, 0.0); grid.len()];
        for (&b, &v) in bins.iter().zip(row) {
            spectrum[b] += v * volume;
        }
        let modulated = grid.inverse(&spectrum);
        let tg = gamma.shifted(&space_shift(lattice, steps, m_flat));
        Some(
            modulated
                .iter()
                .zip(tg.values())
                .map(|(a, b)| a * b)
                .collect::<Vec<_>>(),
        )
    });
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    for part in parts.into_iter().flatten() {
        for (o, p) in out.iter_mut().zip(part) {
            *o += p;
        }
    }
    grid.from_values(out)
}
