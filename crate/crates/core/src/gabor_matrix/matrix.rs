use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::quadrature::{check_spacing, PairKernel, Quadrature, QuadratureConfig, ShiftTable, SpectralWindow, SymbolGrid, PRODUCT_CUTOFF};
use crate::error::{invalid, Error, Result};
use crate::frames::{CoefficientArray, Lattice, LatticeIndex, Window};
use crate::phase_space::PhaseSpacePoint;
use crate::propagators::MultiplierSymbol;
use crate::{par, C64, MAX_DIM};

/// Whether small entries are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mode {
    Dense,
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    /// Entries with modulus below this are dropped in sparse mode.
    pub threshold: f64,
    pub mode: Mode,
    pub quadrature: QuadratureConfig,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions {
            threshold: 0.0,
            mode: Mode::Dense,
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl AssemblyOptions {
    pub fn sparse(threshold: f64) -> Self {
        AssemblyOptions {
            threshold,
            mode: Mode::Sparse,
            ..Self::default()
        }
    }
}

/// Gabor matrix `<T pi(lambda) g, pi(lambda') gamma>` of a Fourier multiplier
/// `T` over a lattice box.
///
/// Multipliers commute with translations, so the entry depends on the space
/// indices only through `m' - m` up to a unimodular phase:
/// `entry(lambda', lambda) = e^{2 pi i alpha beta (m.n - m'.n')} K(m' - m, n, n')`.
/// Only the kernel `K` is stored, with `m' - m` ranging over `[-2R, 2R]^d`.
#[derive(Debug, Clone)]
pub struct GaborMatrix {
    lattice: Lattice,
    operator: String,
    window_in: String,
    window_out: String,
    t: f64,
    derivative: usize,
    threshold: f64,
    mode: Mode,
    kernel: Vec<C64>,
    assembly_error_bound: f64,
    flagged: usize,
    dropped_mass: f64,
    delta: f64,
}

/// Sidecar description of an assembled matrix.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatrixMetadata {
    pub dim: usize,
    pub alpha: f64,
    pub beta: f64,
    pub box_radius: usize,
    pub operator: String,
    pub window_in: String,
    pub window_out: String,
    pub t: f64,
    pub derivative: usize,
    pub threshold: f64,
    pub mode: Mode,
    pub nnz: usize,
    pub dense_size: usize,
    pub assembly_error_bound: f64,
    pub flagged_entries: usize,
    pub dropped_mass: f64,
    pub quadrature_spacing: f64,
}

fn diff_side(lattice: &Lattice) -> usize {
    4 * lattice.box_radius() + 1
}

fn diff_count(lattice: &Lattice) -> usize {
    diff_side(lattice).pow(lattice.dim() as u32)
}

fn diff_flat(lattice: &Lattice, dm: &[i64]) -> Option<usize> {
    let r = 2 * lattice.box_radius() as i64;
    let side = diff_side(lattice);
    let mut flat = 0;
    for &v in &dm[..lattice.dim()] {
        if v.abs() > r {
            return None;
        }
        flat = flat * side + (v + r) as usize;
    }
    Some(flat)
}

fn diff_cell(lattice: &Lattice, mut flat: usize) -> [i64; MAX_DIM] {
    let r = 2 * lattice.box_radius() as i64;
    let side = diff_side(lattice);
    let mut v = [0; MAX_DIM];
    for axis in (0..lattice.dim()).rev() {
        v[axis] = (flat % side) as i64 - r;
        flat /= side;
    }
    v
}

/// Number of `(m, m')` pairs in the box with `m' - m = dm`.
fn multiplicity(lattice: &Lattice, dm: &[i64]) -> usize {
    let side = lattice.side() as i64;
    dm[..lattice.dim()]
        .iter()
        .map(|v| (side - v.abs()).max(0) as usize)
        .product()
}

/// `e^{2 pi i alpha beta m.n}`, with the phase reduced exactly.
fn lattice_phase(lattice: &Lattice, m: &[i64], n: &[i64]) -> C64 {
    let dot: i64 = (0..lattice.dim()).map(|a| m[a] * n[a]).sum();
    let p = lattice.alpha() * lattice.beta() * dot as f64;
    C64::from_polar(1.0, 2.0 * PI * (p - p.round()))
}

fn window_radius(w: &SpectralWindow, axis: usize) -> f64 {
    match w {
        SpectralWindow::Analytic(win) => win.frequency_radius(axis, PRODUCT_CUTOFF),
        SpectralWindow::Sampled { grid, .. } => grid.nyquist(),
    }
}

/// Node bounds covering `centers +- window radii` on every axis.
fn node_bounds(
    dim: usize,
    delta: f64,
    max_center: f64,
    windows: &[&SpectralWindow],
) -> ([i64; MAX_DIM], [i64; MAX_DIM]) {
    let mut lo = [0i64; MAX_DIM];
    let mut hi = [0i64; MAX_DIM];
    for axis in 0..dim {
        let w = windows.iter().map(|w| window_radius(w, axis)).fold(0.0, f64::max);
        let reach = ((max_center + w) / delta).ceil() as i64 + 1;
        lo[axis] = -reach;
        hi[axis] = reach;
    }
    (lo, hi)
}

type Multiplier<'a> = &'a (dyn Fn(&[f64]) -> Result<C64> + Sync);

fn symbol_closure(symbol: &MultiplierSymbol, t: f64, derivative: usize) -> impl Fn(&[f64]) -> Result<C64> + Sync + '_ {
    move |xi: &[f64]| {
        let d = symbol.time_derivatives(t, xi, derivative)?;
        Ok(d.get(derivative).copied().unwrap_or(C64::new(0.0, 0.0)))
    }
}

fn quadrature_spacing(
    config: &QuadratureConfig,
    max_shift: f64,
    windows: &[&SpectralWindow],
) -> Result<f64> {
    let forced = windows.iter().find_map(|w| w.required_spacing());
    let delta = match (forced, config.delta) {
        (Some(f), _) => f,
        (None, _) => config.spacing_for(max_shift),
    };
    check_spacing(windows, delta)?;
    Ok(delta)
}

struct Labels {
    operator: String,
    t: f64,
    derivative: usize,
}

fn assemble_impl(
    multiplier: Multiplier<'_>,
    labels: Labels,
    lattice: &Lattice,
    input: &SpectralWindow,
    output: &SpectralWindow,
    options: &AssemblyOptions,
) -> Result<GaborMatrix> {
    let d = lattice.dim();
    if input.dim() != d || output.dim() != d {
        return Err(Error::GridMismatch("window and lattice dimensions differ".into()));
    }
    if !(options.threshold >= 0.0) {
        return Err(invalid("threshold must be nonnegative"));
    }
    let r = lattice.box_radius() as i64;
    let max_shift = 2.0 * r as f64 * lattice.alpha();
    let windows = [input, output];
    let delta = quadrature_spacing(&options.quadrature, max_shift, &windows)?;
    // On a grid's own frequency bins the sum is the exact discrete inner
    // product, so there is nothing for the coarse pass to verify.
    let verify = windows.iter().all(|w| w.required_spacing().is_none());
    let (lo, hi) = node_bounds(d, delta, lattice.max_frequency(), &windows);
    let symbol = SymbolGrid::new(d, delta, lo, hi, multiplier)?;
    let shifts: Vec<f64> = (-2 * r..=2 * r).map(|k| k as f64 * lattice.alpha()).collect();
    let tables: Vec<ShiftTable> = (0..d)
        .map(|axis| ShiftTable::new(&shifts, delta, lo[axis], hi[axis]))
        .collect();
    let quad = Quadrature {
        dim: d,
        delta,
        input,
        output,
        symbol: &symbol,
        tables: &tables,
    };
    let cells = lattice.cells();
    let pairs: Vec<PairKernel> = par::map(cells * cells, |p| {
        let n_in = lattice.cell(p / cells);
        let n_out = lattice.cell(p % cells);
        let mut c_in = [0.0; MAX_DIM];
        let mut c_out = [0.0; MAX_DIM];
        for axis in 0..d {
            c_in[axis] = n_in[axis] as f64 * lattice.beta();
            c_out[axis] = n_out[axis] as f64 * lattice.beta();
        }
        quad.pair(&c_in[..d], &c_out[..d])
    });
    let count = diff_count(lattice);
    let mut kernel = vec![C64::new(0.0, 0.0); count * cells * cells];
    let mut error_bound: f64 = 0.0;
    let mut flagged = 0;
    for (p, pair) in pairs.iter().enumerate() {
        for dm in 0..count {
            kernel[dm * cells * cells + p] = pair.fine[dm];
            if verify {
                error_bound = error_bound.max((pair.fine[dm] - pair.coarse[dm]).norm());
                if pair.flagged(dm, options.quadrature.richardson_tolerance) {
                    flagged += 1;
                }
            }
        }
    }
    let mut matrix = GaborMatrix {
        lattice: *lattice,
        operator: labels.operator,
        window_in: input.label(),
        window_out: output.label(),
        t: labels.t,
        derivative: labels.derivative,
        threshold: 0.0,
        mode: Mode::Dense,
        kernel,
        assembly_error_bound: error_bound,
        flagged,
        dropped_mass: 0.0,
        delta,
    };
    if options.mode == Mode::Sparse {
        matrix = matrix.thresholded(options.threshold);
    }
    Ok(matrix)
}

/// Gabor matrix of `sigma(t, D)` with the same closed-form window on both sides.
pub fn assemble(
    symbol: &MultiplierSymbol,
    t: f64,
    window: &Window,
    lattice: &Lattice,
    options: &AssemblyOptions,
) -> Result<GaborMatrix> {
    let w = SpectralWindow::analytic(*window);
    assemble_derivative(symbol, t, 0, &w, &w, lattice, options)
}

/// Gabor matrix of `d_t^k sigma(t, D)` for an arbitrary window pair.
pub fn assemble_derivative(
    symbol: &MultiplierSymbol,
    t: f64,
    derivative: usize,
    input: &SpectralWindow,
    output: &SpectralWindow,
    lattice: &Lattice,
    options: &AssemblyOptions,
) -> Result<GaborMatrix> {
    if derivative >= symbol.order() {
        return Err(invalid("time derivative order must be below the operator order"));
    }
    let f = symbol_closure(symbol, t, derivative);
    let labels = Labels {
        operator: String::from(symbol.name()),
        t,
        derivative,
    };
    assemble_impl(&f, labels, lattice, input, output, options)
}

/// Gabor matrix of the multiplier with symbol `multiplier(xi)`.
pub fn assemble_multiplier(
    multiplier: &(dyn Fn(&[f64]) -> Result<C64> + Sync),
    label: &str,
    input: &SpectralWindow,
    output: &SpectralWindow,
    lattice: &Lattice,
    options: &AssemblyOptions,
) -> Result<GaborMatrix> {
    let labels = Labels {
        operator: String::from(label),
        t: 0.0,
        derivative: 0,
    };
    assemble_impl(multiplier, labels, lattice, input, output, options)
}

/// A single entry with its quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryValue {
    pub value: C64,
    /// `|fine - coarse|` of the two quadrature resolutions.
    pub richardson_difference: f64,
    pub flagged: bool,
}

/// `<sigma(t, D) pi(z) g, pi(z') g>` at arbitrary phase-space points.
pub fn matrix_entry(
    symbol: &MultiplierSymbol,
    t: f64,
    window: &Window,
    z: &PhaseSpacePoint,
    z_prime: &PhaseSpacePoint,
    config: &QuadratureConfig,
) -> Result<EntryValue> {
    let d = window.dim();
    if z.dim() != d || z_prime.dim() != d || symbol.dim() != d {
        return Err(invalid("entry points, window and symbol must share the dimension"));
    }
    let w = SpectralWindow::analytic(*window);
    let max_shift = z.sub(z_prime).x().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let delta = config.spacing_for(max_shift);
    let max_center = z.xi().iter().chain(z_prime.xi()).fold(0.0f64, |a, v| a.max(v.abs()));
    let (lo, hi) = node_bounds(d, delta, max_center, &[&w, &w]);
    let f = symbol_closure(symbol, t, 0);
    let grid = SymbolGrid::new(d, delta, lo, hi, &f)?;
    let tables: Vec<ShiftTable> = (0..d)
        .map(|a| ShiftTable::new(&[z_prime.x()[a] - z.x()[a]], delta, lo[a], hi[a]))
        .collect();
    let quad = Quadrature {
        dim: d,
        delta,
        input: &w,
        output: &w,
        symbol: &grid,
        tables: &tables,
    };
    let pair = quad.pair(z.xi(), z_prime.xi());
    let dot = |p: &PhaseSpacePoint| -> f64 { (0..d).map(|a| p.x()[a] * p.xi()[a]).sum() };
    let phase = C64::from_polar(1.0, 2.0 * PI * (dot(z) - dot(z_prime)));
    let diff = (pair.fine[0] - pair.coarse[0]).norm();
    Ok(EntryValue {
        value: phase * pair.fine[0],
        richardson_difference: diff,
        flagged: pair.flagged(0, config.richardson_tolerance),
    })
}

/// One column `lambda` of a Gabor matrix, over every row `lambda'` in the box.
#[derive(Debug, Clone)]
pub struct GaborColumn {
    pub lattice: Lattice,
    pub column: LatticeIndex,
    /// Row values in lattice order.
    pub values: Vec<C64>,
    pub flagged: usize,
}

impl GaborColumn {
    pub fn rows(&self) -> impl Iterator<Item = (LatticeIndex, C64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(f, v)| (self.lattice.index(f), *v))
    }
}

/// Column `lambda` of the `g`-`g` Gabor matrix of `sigma(t, D)`, without
/// assembling the rest.
pub fn assemble_column(
    symbol: &MultiplierSymbol,
    t: f64,
    window: &Window,
    lattice: &Lattice,
    column: &LatticeIndex,
    config: &QuadratureConfig,
) -> Result<GaborColumn> {
    let d = lattice.dim();
    if window.dim() != d || symbol.dim() != d {
        return Err(invalid("symbol, window and lattice must share the dimension"));
    }
    if lattice.flat_index(column).is_none() {
        return Err(invalid("column index outside the lattice box"));
    }
    let w = SpectralWindow::analytic(*window);
    let r = lattice.box_radius() as i64;
    let max_shift = (0..d)
        .map(|a| (column.m[a].abs() + r) as f64 * lattice.alpha())
        .fold(0.0, f64::max);
    let delta = config.spacing_for(max_shift);
    let (lo, hi) = node_bounds(d, delta, lattice.max_frequency(), &[&w, &w]);
    let f = symbol_closure(symbol, t, 0);
    let grid = SymbolGrid::new(d, delta, lo, hi, &f)?;
    let tables: Vec<ShiftTable> = (0..d)
        .map(|a| {
            let shifts: Vec<f64> = (-r..=r)
                .map(|mp| (mp - column.m[a]) as f64 * lattice.alpha())
                .collect();
            ShiftTable::new(&shifts, delta, lo[a], hi[a])
        })
        .collect();
    let quad = Quadrature {
        dim: d,
        delta,
        input: &w,
        output: &w,
        symbol: &grid,
        tables: &tables,
    };
    let mut c_in = [0.0; MAX_DIM];
    for a in 0..d {
        c_in[a] = column.n[a] as f64 * lattice.beta();
    }
    let cells = lattice.cells();
    let pairs = par::map(cells, |n_flat| {
        let n_out = lattice.cell(n_flat);
        let mut c_out = [0.0; MAX_DIM];
        for a in 0..d {
            c_out[a] = n_out[a] as f64 * lattice.beta();
        }
        quad.pair(&c_in[..d], &c_out[..d])
    });
    let phase_in = lattice_phase(lattice, &column.m, &column.n);
    let mut values = vec![C64::new(0.0, 0.0); lattice.len()];
    let mut flagged = 0;
    for (n_flat, pair) in pairs.iter().enumerate() {
        let n_out = lattice.cell(n_flat);
        for m_flat in 0..cells {
            let m_out = lattice.cell(m_flat);
            let k = pair.fine[m_flat];
            if pair.flagged(m_flat, config.richardson_tolerance) {
                flagged += 1;
            }
            values[m_flat * cells + n_flat] = phase_in * lattice_phase(lattice, &m_out, &n_out).conj() * k;
        }
    }
    Ok(GaborColumn {
        lattice: *lattice,
        column: *column,
        values,
        flagged,
    })
}

impl GaborMatrix {
    /// Matrix with kernel `K(dm, n, n') = kernel(dm, n, n')`.
    pub fn from_kernel_fn(
        lattice: &Lattice,
        label: &str,
        kernel: impl Fn(&[i64], &[i64], &[i64]) -> C64,
    ) -> Self {
        let cells = lattice.cells();
        let d = lattice.dim();
        let values = (0..diff_count(lattice) * cells * cells)
            .map(|i| {
                let dm = diff_cell(lattice, i / (cells * cells));
                let n_in = lattice.cell((i / cells) % cells);
                let n_out = lattice.cell(i % cells);
                kernel(&dm[..d], &n_in[..d], &n_out[..d])
            })
            .collect();
        GaborMatrix {
            lattice: *lattice,
            operator: String::from(label),
            window_in: String::new(),
            window_out: String::new(),
            t: 0.0,
            derivative: 0,
            threshold: 0.0,
            mode: Mode::Dense,
            kernel: values,
            assembly_error_bound: 0.0,
            flagged: 0,
            dropped_mass: 0.0,
            delta: 0.0,
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn assembly_error_bound(&self) -> f64 {
        self.assembly_error_bound
    }

    pub fn flagged_entries(&self) -> usize {
        self.flagged
    }

    /// Sum of the moduli of the dropped entries (each below the threshold).
    pub fn dropped_mass(&self) -> f64 {
        self.dropped_mass
    }

    /// Number of `(row, column)` pairs in the box.
    pub fn dense_size(&self) -> usize {
        self.lattice.len() * self.lattice.len()
    }

    /// Copy with every entry of modulus below `theta` removed.
    pub fn thresholded(&self, theta: f64) -> GaborMatrix {
        let mut out = self.clone();
        let cells = self.lattice.cells();
        let mut dropped = 0.0;
        for (i, v) in out.kernel.iter_mut().enumerate() {
            if *v != C64::new(0.0, 0.0) && v.norm() < theta {
                let dm = diff_cell(&self.lattice, i / (cells * cells));
                dropped += v.norm() * multiplicity(&self.lattice, &dm) as f64;
                *v = C64::new(0.0, 0.0);
            }
        }
        out.threshold = theta;
        out.mode = Mode::Sparse;
        out.dropped_mass = self.dropped_mass + dropped;
        out
    }

    /// Number of stored nonzero entries.
    pub fn nnz(&self) -> usize {
        let cells = self.lattice.cells();
        self.kernel
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != C64::new(0.0, 0.0))
            .map(|(i, _)| multiplicity(&self.lattice, &diff_cell(&self.lattice, i / (cells * cells))))
            .sum()
    }

    /// `K(m' - m, n, n')`; zero outside the stored range.
    pub fn kernel(&self, dm: &[i64], n_in: &[i64], n_out: &[i64]) -> C64 {
        let cells = self.lattice.cells();
        match (
            diff_flat(&self.lattice, dm),
            self.lattice.flat_cell(n_in),
            self.lattice.flat_cell(n_out),
        ) {
            (Some(a), Some(b), Some(c)) => self.kernel[(a * cells + b) * cells + c],
            _ => C64::new(0.0, 0.0),
        }
    }

    /// Every kernel value with its `(m' - m, n, n')`.
    pub fn kernel_entries(&self) -> impl Iterator<Item = ([i64; MAX_DIM], [i64; MAX_DIM], [i64; MAX_DIM], C64)> + '_ {
        let cells = self.lattice.cells();
        self.kernel.iter().enumerate().map(move |(i, v)| {
            (
                diff_cell(&self.lattice, i / (cells * cells)),
                self.lattice.cell((i / cells) % cells),
                self.lattice.cell(i % cells),
                *v,
            )
        })
    }

    /// `entry(lambda', lambda)`: row `lambda'`, column `lambda`.
    pub fn entry(&self, row: &LatticeIndex, col: &LatticeIndex) -> C64 {
        if self.lattice.flat_index(row).is_none() || self.lattice.flat_index(col).is_none() {
            return C64::new(0.0, 0.0);
        }
        let mut dm = [0i64; MAX_DIM];
        for a in 0..self.lattice.dim() {
            dm[a] = row.m[a] - col.m[a];
        }
        let k = self.kernel(&dm, &col.n, &row.n);
        if k == C64::new(0.0, 0.0) {
            return k;
        }
        lattice_phase(&self.lattice, &col.m, &col.n) * lattice_phase(&self.lattice, &row.m, &row.n).conj() * k
    }

    pub fn column(&self, col: &LatticeIndex) -> Vec<(LatticeIndex, C64)> {
        self.lattice
            .indices()
            .map(|row| (row, self.entry(&row, col)))
            .collect()
    }

    /// Nonzero entries as `(row, column, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (LatticeIndex, LatticeIndex, C64)> + '_ {
        let len = self.lattice.len();
        (0..len * len).filter_map(move |i| {
            let col = self.lattice.index(i / len);
            let row = self.lattice.index(i % len);
            let v = self.entry(&row, &col);
            (v != C64::new(0.0, 0.0)).then_some((row, col, v))
        })
    }

    /// `d_{lambda'} = sum_lambda entry(lambda', lambda) c_lambda`.
    pub fn apply(&self, c: &CoefficientArray) -> Result<CoefficientArray> {
        if c.lattice() != &self.lattice {
            return Err(invalid("coefficient lattice differs from the matrix lattice"));
        }
        let lattice = &self.lattice;
        let d = lattice.dim();
        let cells = lattice.cells();
        let count = diff_count(lattice);
        // fold the column phases into the input once
        let phased: Vec<C64> = c
            .iter()
            .map(|(idx, v)| lattice_phase(lattice, &idx.m, &idx.n) * v)
            .collect();
        let rows = par::map(cells, |n_out| {
            let mut acc = vec![C64::new(0.0, 0.0); cells];
            for dm_flat in 0..count {
                let dm = diff_cell(lattice, dm_flat);
                for n_in in 0..cells {
                    let k = self.kernel[(dm_flat * cells + n_in) * cells + n_out];
                    if k == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for m_in in 0..cells {
                        let m = lattice.cell(m_in);
                        let mut mp = [0i64; MAX_DIM];
                        for a in 0..d {
                            mp[a] = m[a] + dm[a];
                        }
                        if let Some(m_out) = lattice.flat_cell(&mp) {
                            acc[m_out] += k * phased[m_in * cells + n_in];
                        }
                    }
                }
            }
            acc
        });
        let mut out = CoefficientArray::zeros(lattice);
        let n_out_cells: Vec<[i64; MAX_DIM]> = (0..cells).map(|f| lattice.cell(f)).collect();
        for (n_out, acc) in rows.into_iter().enumerate() {
            for (m_out, v) in acc.into_iter().enumerate() {
                let m = lattice.cell(m_out);
                out.values_mut()[m_out * cells + n_out] =
                    lattice_phase(lattice, &m, &n_out_cells[n_out]).conj() * v;
            }
        }
        Ok(out)
    }

    /// Largest column sum of moduli, `max_lambda sum_lambda' |entry|`.
    pub fn max_column_sum(&self) -> f64 {
        let lattice = &self.lattice;
        let d = lattice.dim();
        let cells = lattice.cells();
        let count = diff_count(lattice);
        // s[dm][n] = sum over n' of |K(dm, n, n')|
        let mut s = vec![0.0; count * cells];
        for dm in 0..count {
            for n_in in 0..cells {
                s[dm * cells + n_in] = (0..cells)
                    .map(|n_out| self.kernel[(dm * cells + n_in) * cells + n_out].norm())
                    .sum();
            }
        }
        let mut best: f64 = 0.0;
        for m_flat in 0..cells {
            let m = lattice.cell(m_flat);
            for n_in in 0..cells {
                let mut total = 0.0;
                for dm_flat in 0..count {
                    let dm = diff_cell(lattice, dm_flat);
                    let mut inside = true;
                    for a in 0..d {
                        if (m[a] + dm[a]).abs() > lattice.box_radius() as i64 {
                            inside = false;
                        }
                    }
                    if inside {
                        total += s[dm_flat * cells + n_in];
                    }
                }
                best = best.max(total);
            }
        }
        best
    }

    /// Largest `|entry(l', l) - conj(entry(l, l'))|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (dm, n_in, n_out, k) in self.kernel_entries() {
            let mut neg = [0i64; MAX_DIM];
            for a in 0..self.lattice.dim() {
                neg[a] = -dm[a];
            }
            worst = worst.max((k - self.kernel(&neg, &n_out, &n_in).conj()).norm());
        }
        worst
    }

    pub fn metadata(&self) -> MatrixMetadata {
        MatrixMetadata {
            dim: self.lattice.dim(),
            alpha: self.lattice.alpha(),
            beta: self.lattice.beta(),
            box_radius: self.lattice.box_radius(),
            operator: self.operator.clone(),
            window_in: self.window_in.clone(),
            window_out: self.window_out.clone(),
            t: self.t,
            derivative: self.derivative,
            threshold: self.threshold,
            mode: self.mode,
            nnz: self.nnz(),
            dense_size: self.dense_size(),
            assembly_error_bound: self.assembly_error_bound,
            flagged_entries: self.flagged,
            dropped_mass: self.dropped_mass,
            quadrature_spacing: self.delta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::Lattice;

    fn gram_oracle(dm: f64, dn: f64) -> f64 {
        (-PI * (dm * dm + dn * dn) / 2.0).exp()
    }

    fn heat_matrix(t: f64, r: usize) -> GaborMatrix {
        let lattice = Lattice::standard(1, r).unwrap();
        let w = Window::gaussian(1).unwrap();
        assemble(&MultiplierSymbol::heat(1).unwrap(), t, &w, &lattice, &AssemblyOptions::default()).unwrap()
    }

    #[test]
    fn heat_at_zero_is_the_gaussian_gram_matrix() {
        let m = heat_matrix(0.0, 4);
        for (row, col, v) in m.triplets() {
            let dm = (row.m[0] - col.m[0]) as f64;
            let dn = 0.5 * (row.n[0] - col.n[0]) as f64;
            assert!((v.norm() - gram_oracle(dm, dn)).abs() < 1e-12);
        }
        assert_eq!(m.flagged_entries(), 0);
    }

    #[test]
    fn identity_multiplier_matches_heat_at_zero() {
        let lattice = Lattice::standard(1, 3).unwrap();
        let w = SpectralWindow::analytic(Window::gaussian(1).unwrap());
        let one = |_: &[f64]| Ok(C64::new(1.0, 0.0));
        let id = assemble_multiplier(&one, "identity", &w, &w, &lattice, &AssemblyOptions::default()).unwrap();
        let heat = heat_matrix(0.0, 3);
        for (row, col, v) in id.triplets() {
            assert!((v - heat.entry(&row, &col)).norm() < 1e-15);
        }
    }

    #[test]
    fn entry_phase_matches_direct_quadrature() {
        let lattice = Lattice::standard(1, 3).unwrap();
        let w = Window::gaussian(1).unwrap();
        let sym = MultiplierSymbol::wave(1).unwrap();
        let m = assemble(&sym, 0.5, &w, &lattice, &AssemblyOptions::default()).unwrap();
        let col = LatticeIndex::new(&[1], &[-2]);
        let row = LatticeIndex::new(&[2], &[-1]);
        let direct = matrix_entry(&sym, 0.5, &w, &lattice.point(&col), &lattice.point(&row), &QuadratureConfig::default()).unwrap();
        assert!((direct.value - m.entry(&row, &col)).norm() < 1e-13);
        assert!(!direct.flagged);
    }

    #[test]
    fn entries_are_translation_invariant_in_modulus() {
        let w = Window::gaussian(1).unwrap();
        let sym = MultiplierSymbol::klein_gordon(1, 1.0).unwrap();
        let cfg = QuadratureConfig::default();
        let p = |x: f64, xi: f64| PhaseSpacePoint::new(&[x], &[xi]).unwrap();
        let a = matrix_entry(&sym, 0.3, &w, &p(0.0, 0.5), &p(1.0, 1.0), &cfg).unwrap();
        let b = matrix_entry(&sym, 0.3, &w, &p(3.0, 0.5), &p(4.0, 1.0), &cfg).unwrap();
        assert!((a.value.norm() - b.value.norm()).abs() < 1e-12);
    }

    #[test]
    fn single_column_matches_full_matrix() {
        let lattice = Lattice::standard(2, 2).unwrap();
        let w = Window::gaussian(2).unwrap();
        let sym = MultiplierSymbol::heat(2).unwrap();
        let m = assemble(&sym, 0.2, &w, &lattice, &AssemblyOptions::default()).unwrap();
        let col = LatticeIndex::new(&[1, -1], &[0, 2]);
        let c = assemble_column(&sym, 0.2, &w, &lattice, &col, &QuadratureConfig::default()).unwrap();
        for (row, v) in c.rows() {
            assert!((v - m.entry(&row, &col)).norm() < 1e-13);
        }
    }

    #[test]
    fn apply_matches_explicit_sum() {
        let m = heat_matrix(0.1, 3);
        let lattice = *m.lattice();
        let values: Vec<C64> = (0..lattice.len())
            .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let c = CoefficientArray::from_values(&lattice, values).unwrap();
        let out = m.apply(&c).unwrap();
        for row in lattice.indices() {
            let direct: C64 = lattice.indices().map(|col| m.entry(&row, &col) * c.get(&col)).sum();
            assert!((direct - out.get(&row)).norm() < 1e-13);
        }
    }

    #[test]
    fn thresholding_is_monotone_and_controlled() {
        let dense = heat_matrix(0.1, 6);
        let loose = dense.thresholded(1e-4);
        let tight = dense.thresholded(1e-8);
        assert!(loose.nnz() < tight.nnz());
        assert!(tight.nnz() <= dense.nnz());
        for theta in [1e-8, 1e-4] {
            let sparse = dense.thresholded(theta);
            let diff = GaborMatrix::from_kernel_fn(dense.lattice(), "diff", |dm, n, np| {
                dense.kernel(dm, n, np) - sparse.kernel(dm, n, np)
            });
            assert!(diff.max_column_sum() <= theta * dense.lattice().len() as f64);
            assert!(sparse.triplets().all(|(_, _, v)| v.norm() >= theta));
        }
    }

    #[test]
    fn real_even_symbols_give_hermitian_matrices() {
        assert!(heat_matrix(0.3, 4).hermitian_defect() < 1e-12);
        let lattice = Lattice::standard(1, 4).unwrap();
        let w = Window::gaussian(1).unwrap();
        let ph = assemble(&MultiplierSymbol::poly_heat(1, 2).unwrap(), 0.05, &w, &lattice, &AssemblyOptions::default()).unwrap();
        assert!(ph.hermitian_defect() < 1e-12);
    }

    #[test]
    fn max_column_sum_matches_brute_force() {
        let m = heat_matrix(0.2, 2);
        let lattice = *m.lattice();
        let brute = lattice
            .indices()
            .map(|col| lattice.indices().map(|row| m.entry(&row, &col).norm()).sum::<f64>())
            .fold(0.0, f64::max);
        assert!((brute - m.max_column_sum()).abs() < 1e-13);
    }

    #[test]
    fn nnz_counts_every_dense_entry() {
        let m = heat_matrix(0.0, 2);
        assert_eq!(m.nnz(), m.triplets().count());
        assert_eq!(m.dense_size(), 25 * 25);
    }

    #[test]
    fn derivative_order_is_checked() {
        let lattice = Lattice::standard(1, 1).unwrap();
        let w = SpectralWindow::analytic(Window::gaussian(1).unwrap());
        let sym = MultiplierSymbol::heat(1).unwrap();
        assert!(assemble_derivative(&sym, 0.1, 1, &w, &w, &lattice, &AssemblyOptions::default()).is_err());
    }
}
