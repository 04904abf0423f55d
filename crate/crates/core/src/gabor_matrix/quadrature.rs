//! Frequency-side quadrature for Gabor-matrix entries of Fourier multipliers.
//!
//! For `z = (x, xi)` and `z' = (x', xi')`,
//! `<sigma(D) pi(z) g, pi(z') gamma> = e^{2 pi i (x.xi - x'.xi')} K`, where
//! `K = int sigma(eta) g^(eta - xi) conj(gamma^(eta - xi')) e^{2 pi i (x' - x).eta} d eta`.
//! `K` is evaluated by the trapezoidal rule on the global nodes `eta = j delta`,
//! restricted to the box where the window product is not negligible, and
//! checked against the same rule on every other node.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::frames::Window;
use crate::grid::{SampledFunction, SampledGrid};
use crate::{C64, MAX_DIM};

/// Window-product values below this fraction of their peak are outside the
/// integration box.
pub const PRODUCT_CUTOFF: f64 = 1e-16;

/// Absolute differences below this are roundoff, never flagged.
const ROUNDOFF_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Node spacing; `None` picks `2^{-k}` from the largest space shift.
    pub delta: Option<f64>,
    /// Fine and coarse sums must agree to this fraction of the integrand's
    /// L1 mass, otherwise the entry is flagged.
    pub richardson_tolerance: f64,
    /// Distance in space between the largest shift and the first alias of
    /// the coarse rule. Symbols whose kernels spread widely need more.
    pub space_margin: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            delta: None,
            richardson_tolerance: 1e-9,
            space_margin: 6.0,
        }
    }
}

impl QuadratureConfig {
    /// Node spacing for shifts up to `max_shift`: the coarse rule (spacing
    /// `2 delta`) must keep its first alias `space_margin` beyond the shift.
    pub fn spacing_for(&self, max_shift: f64) -> f64 {
        if let Some(d) = self.delta {
            return d;
        }
        let mut inv = 32.0;
        while inv / 2.0 < max_shift + self.space_margin {
            inv *= 2.0;
        }
        1.0 / inv
    }
}

/// A window known through its Fourier transform.
#[derive(Debug, Clone)]
pub enum SpectralWindow {
    Analytic(Window),
    /// Spectrum of a sampled window on its grid; nodes must coincide with
    /// the grid's frequency bins.
    Sampled {
        grid: SampledGrid,
        spectrum: Vec<C64>,
        /// Per axis, the largest `|spectrum|` over the other axes at each bin.
        profile: Vec<Vec<f64>>,
        label: String,
    },
}

impl SpectralWindow {
    pub fn analytic(window: Window) -> Self {
        SpectralWindow::Analytic(window)
    }

    pub fn sampled(f: &SampledFunction, label: &str) -> Self {
        let grid = f.grid().clone();
        let spectrum = f.spectrum();
        let n = grid.points();
        let mut profile = vec![vec![0.0f64; n]; grid.dim()];
        for (flat, v) in spectrum.iter().enumerate() {
            let idx = grid.unflatten(flat);
            for axis in 0..grid.dim() {
                let slot = &mut profile[axis][idx[axis]];
                *slot = slot.max(v.norm());
            }
        }
        SpectralWindow::Sampled {
            grid,
            spectrum,
            profile,
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SpectralWindow::Analytic(w) => w.dim(),
            SpectralWindow::Sampled { grid, .. } => grid.dim(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SpectralWindow::Analytic(w) => w.label(),
            SpectralWindow::Sampled { label, .. } => label.clone(),
        }
    }

    /// Node spacing this window forces, if any.
    pub fn required_spacing(&self) -> Option<f64> {
        match self {
            SpectralWindow::Analytic(_) => None,
            SpectralWindow::Sampled { grid, .. } => Some(grid.period().recip()),
        }
    }

    /// Half-width (in frequency) beyond which the window is below
    /// `tol` times its peak on `axis`.
    fn radius(&self, axis: usize, tol: f64) -> f64 {
        match self {
            SpectralWindow::Analytic(w) => w.frequency_radius(axis, tol),
            SpectralWindow::Sampled { grid, profile, .. } => {
                let p = &profile[axis];
                let peak = p.iter().cloned().fold(0.0, f64::max);
                let mut r: f64 = 0.0;
                for (k, v) in p.iter().enumerate() {
                    if *v > tol * peak {
                        r = r.max(grid.frequency(k).abs());
                    }
                }
                r + grid.period().recip()
            }
        }
    }

    /// `|g^(eta)|` profile along one axis.
    fn axis_profile(&self, axis: usize, eta: f64, delta: f64) -> f64 {
        match self {
            SpectralWindow::Analytic(w) => w.axis_spectrum(axis, eta).norm(),
            SpectralWindow::Sampled { grid, profile, .. } => {
                bin(grid, eta, delta).map_or(0.0, |b| profile[axis][b])
            }
        }
    }
}

fn bin(grid: &SampledGrid, eta: f64, delta: f64) -> Option<usize> {
    let k = (eta / delta).round() as i64 + (grid.points() / 2) as i64;
    if k >= 0 && (k as usize) < grid.points() {
        Some(k as usize)
    } else {
        None
    }
}

/// Symbol values on the node box `lo[a] .. lo[a] + len[a]` (node indices).
#[derive(Debug, Clone)]
pub(crate) struct SymbolGrid {
    dim: usize,
    lo: [i64; MAX_DIM],
    len: [usize; MAX_DIM],
    values: Vec<C64>,
}

impl SymbolGrid {
    pub fn new(
        dim: usize,
        delta: f64,
        lo: [i64; MAX_DIM],
        hi: [i64; MAX_DIM],
        symbol: &(dyn Fn(&[f64]) -> Result<C64> + Sync),
    ) -> Result<Self> {
        let mut len = [1usize; MAX_DIM];
        for axis in 0..dim {
            len[axis] = (hi[axis] - lo[axis] + 1).max(0) as usize;
        }
        let total: usize = len[..dim].iter().product();
        let values = crate::par::map(total, |flat| {
            let mut rest = flat;
            let mut xi = [0.0; MAX_DIM];
            for axis in (0..dim).rev() {
                xi[axis] = (lo[axis] + (rest % len[axis]) as i64) as f64 * delta;
                rest /= len[axis];
            }
            symbol(&xi[..dim])
        });
        let values = values.into_iter().collect::<Result<Vec<_>>>()?;
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::SymbolOverflow { t: f64::NAN });
        }
        Ok(SymbolGrid {
            dim,
            lo,
            len,
            values,
        })
    }

    fn get(&self, node: &[i64]) -> C64 {
        let mut flat = 0usize;
        for axis in 0..self.dim {
            let off = node[axis] - self.lo[axis];
            debug_assert!(off >= 0 && (off as usize) < self.len[axis]);
            flat = flat * self.len[axis] + off as usize;
        }
        self.values[flat]
    }
}

/// `e^{2 pi i s eta_j}` for each shift `s` of one axis and each node `j`.
#[derive(Debug, Clone)]
pub(crate) struct ShiftTable {
    lo: i64,
    rows: Vec<Vec<C64>>,
}

impl ShiftTable {
    pub fn new(shifts: &[f64], delta: f64, lo: i64, hi: i64) -> Self {
        let rows = shifts
            .iter()
            .map(|&s| {
                (lo..=hi)
                    .map(|j| {
                        // reduce the phase before scaling to keep it accurate
                        let p = s * j as f64 * delta;
                        C64::from_polar(1.0, 2.0 * PI * (p - p.round()))
                    })
                    .collect()
            })
            .collect();
        ShiftTable { lo, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }
}

/// Result of one `(xi, xi')` pair: `K` for every shift combination
/// (row-major over the axes' shift lists).
#[derive(Debug, Clone)]
pub(crate) struct PairKernel {
    pub fine: Vec<C64>,
    pub coarse: Vec<C64>,
    pub scale: f64,
}

impl PairKernel {
    fn empty(count: usize) -> Self {
        PairKernel {
            fine: vec![C64::new(0.0, 0.0); count],
            coarse: vec![C64::new(0.0, 0.0); count],
            scale: 0.0,
        }
    }

    /// The two resolutions disagree by more than `tolerance` relative to the
    /// pair's `L1` mass, and by more than double-precision roundoff of an
    /// `O(1)` entry.
    pub fn flagged(&self, i: usize, tolerance: f64) -> bool {
        let diff = (self.fine[i] - self.coarse[i]).norm();
        diff > tolerance * self.scale && diff > ROUNDOFF_FLOOR
    }
}

pub(crate) struct Quadrature<'a> {
    pub dim: usize,
    pub delta: f64,
    pub input: &'a SpectralWindow,
    pub output: &'a SpectralWindow,
    pub symbol: &'a SymbolGrid,
    pub tables: &'a [ShiftTable],
}

impl Quadrature<'_> {
    /// Node range of the integration box on one axis.
    fn axis_box(&self, axis: usize, c_in: f64, c_out: f64) -> Option<(i64, i64)> {
        let w_in = self.input.radius(axis, PRODUCT_CUTOFF);
        let w_out = self.output.radius(axis, PRODUCT_CUTOFF);
        let lo = (c_in - w_in).max(c_out - w_out);
        let hi = (c_in + w_in).min(c_out + w_out);
        if lo > hi {
            return None;
        }
        let mut jlo = (lo / self.delta).ceil() as i64;
        let mut jhi = (hi / self.delta).floor() as i64;
        let prof = |j: i64| {
            let eta = j as f64 * self.delta;
            self.input.axis_profile(axis, eta - c_in, self.delta)
                * self.output.axis_profile(axis, eta - c_out, self.delta)
        };
        let peak = (jlo..=jhi).map(prof).fold(0.0, f64::max);
        if peak == 0.0 {
            return None;
        }
        while jlo < jhi && prof(jlo) < PRODUCT_CUTOFF * peak {
            jlo += 1;
        }
        while jhi > jlo && prof(jhi) < PRODUCT_CUTOFF * peak {
            jhi -= 1;
        }
        Some((jlo, jhi))
    }

    /// Window factor `g^(eta - c_in) conj(gamma^(eta - c_out))` on the box.
    fn window_block(&self, lo: &[i64], len: &[usize], c_in: &[f64], c_out: &[f64]) -> Vec<C64> {
        let d = self.dim;
        let total: usize = len[..d].iter().product();
        match (self.input, self.output) {
            (SpectralWindow::Analytic(a), SpectralWindow::Analytic(b)) => {
                // separable: per-axis factors, multiplied out
                let axes: Vec<Vec<C64>> = (0..d)
                    .map(|axis| {
                        (0..len[axis])
                            .map(|i| {
                                let eta = (lo[axis] + i as i64) as f64 * self.delta;
                                a.axis_spectrum(axis, eta - c_in[axis])
                                    * b.axis_spectrum(axis, eta - c_out[axis]).conj()
                            })
                            .collect()
                    })
                    .collect();
                let norm = a.normalization() * b.normalization();
                (0..total)
                    .map(|flat| {
                        let mut rest = flat;
                        let mut v = C64::new(norm, 0.0);
                        for axis in (0..d).rev() {
                            v *= axes[axis][rest % len[axis]];
                            rest /= len[axis];
                        }
                        v
                    })
                    .collect()
            }
            _ => (0..total)
                .map(|flat| {
                    let mut rest = flat;
                    let mut e_in = [0.0; MAX_DIM];
                    let mut e_out = [0.0; MAX_DIM];
                    for axis in (0..d).rev() {
                        let eta = (lo[axis] + (rest % len[axis]) as i64) as f64 * self.delta;
                        e_in[axis] = eta - c_in[axis];
                        e_out[axis] = eta - c_out[axis];
                        rest /= len[axis];
                    }
                    spectral_value(self.input, &e_in[..d], self.delta)
                        * spectral_value(self.output, &e_out[..d], self.delta).conj()
                })
                .collect(),
        }
    }

    pub fn pair(&self, c_in: &[f64], c_out: &[f64]) -> PairKernel {
        let d = self.dim;
        let count: usize = self.tables.iter().map(|t| t.len()).product();
        let mut lo = [0i64; MAX_DIM];
        let mut len = [1usize; MAX_DIM];
        for axis in 0..d {
            match self.axis_box(axis, c_in[axis], c_out[axis]) {
                Some((a, b)) => {
                    lo[axis] = a;
                    len[axis] = (b - a + 1) as usize;
                }
                None => return PairKernel::empty(count),
            }
        }
        let mut f = self.window_block(&lo, &len, c_in, c_out);
        let mut node = [0i64; MAX_DIM];
        let mut scale = 0.0;
        for (flat, v) in f.iter_mut().enumerate() {
            let mut rest = flat;
            for axis in (0..d).rev() {
                node[axis] = lo[axis] + (rest % len[axis]) as i64;
                rest /= len[axis];
            }
            *v *= self.symbol.get(&node[..d]);
            scale += v.norm();
        }
        let cell = self.delta.powi(d as i32);
        scale *= cell;

        // every other node, anchored at even global indices
        let mut c_lo = [0i64; MAX_DIM];
        let mut c_len = [1usize; MAX_DIM];
        let mut first = [0usize; MAX_DIM];
        for axis in 0..d {
            first[axis] = lo[axis].rem_euclid(2) as usize;
            c_lo[axis] = lo[axis] + first[axis] as i64;
            c_len[axis] = (len[axis] - first[axis]).div_ceil(2);
        }
        let c_total: usize = c_len[..d].iter().product();
        let coarse_f: Vec<C64> = (0..c_total)
            .map(|flat| {
                let mut rest = flat;
                let mut src = 0usize;
                let mut stride = 1usize;
                for axis in (0..d).rev() {
                    let i = rest % c_len[axis];
                    rest /= c_len[axis];
                    src += (first[axis] + 2 * i) * stride;
                    stride *= len[axis];
                }
                f[src]
            })
            .collect();

        let fine = contract(f, &len[..d], &lo[..d], 1, self.tables);
        let coarse = contract(coarse_f, &c_len[..d], &c_lo[..d], 2, self.tables);
        let c_cell = (2.0 * self.delta).powi(d as i32);
        PairKernel {
            fine: fine.into_iter().map(|v| v * cell).collect(),
            coarse: coarse.into_iter().map(|v| v * c_cell).collect(),
            scale,
        }
    }
}

fn spectral_value(w: &SpectralWindow, eta: &[f64], delta: f64) -> C64 {
    match w {
        SpectralWindow::Analytic(w) => w.spectrum(eta),
        SpectralWindow::Sampled { grid, spectrum, .. } => {
            let mut idx = [0usize; MAX_DIM];
            for axis in 0..grid.dim() {
                match bin(grid, eta[axis], delta) {
                    Some(b) => idx[axis] = b,
                    None => return C64::new(0.0, 0.0),
                }
            }
            spectrum[grid.flatten(&idx)]
        }
    }
}

/// Contracts each axis of `f` (shape `len`, node offsets `lo`, node step
/// `step`) against its shift table, last axis first.
fn contract(mut f: Vec<C64>, len: &[usize], lo: &[i64], step: i64, tables: &[ShiftTable]) -> Vec<C64> {
    let d = len.len();
    let mut shape: Vec<usize> = len.to_vec();
    for axis in (0..d).rev() {
        let table = &tables[axis];
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        let n = shape[axis];
        let k_count = table.len();
        let mut out = vec![C64::new(0.0, 0.0); outer * k_count * inner];
        let base = (lo[axis] - table.lo) as usize;
        for (k, row) in table.rows.iter().enumerate() {
            for o in 0..outer {
                let dst = &mut out[(o * k_count + k) * inner..(o * k_count + k + 1) * inner];
                for j in 0..n {
                    let w = row[base + j * step as usize];
                    let src = &f[(o * n + j) * inner..(o * n + j + 1) * inner];
                    for (a, b) in dst.iter_mut().zip(src) {
                        *a += w * b;
                    }
                }
            }
        }
        shape[axis] = k_count;
        f = out;
    }
    f
}

/// Checks that a sampled window's bins line up with the nodes.
pub(crate) fn check_spacing(windows: &[&SpectralWindow], delta: f64) -> Result<()> {
    for w in windows {
        if let Some(req) = w.required_spacing() {
            if (req - delta).abs() > 1e-12 * delta {
                return Err(invalid(
                    "sampled windows need quadrature spacing equal to 1/L of their grid",
                ));
            }
        }
    }
    Ok(())
}
