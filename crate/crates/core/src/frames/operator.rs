//! The frame operator `S f = sum_lambda <f, pi(lambda) g> pi(lambda) g` of the
//! periodic discrete Gabor system on a grid, its extremal eigenvalues and the
//! canonical dual window `S^{-1} g`.
//!
//! On a grid of period `L` the lattice is taken modulo `L` in space and
//! modulo `1/h` in frequency, so every sample sees the full frame. In that
//! setting `S` has the Walnut form
//! `S f(x) = beta^{-d} sum_j G_j(x) f(x - j/beta)` with
//! `G_j(x) = sum_m g(x - alpha m) conj(g(x - alpha m - j/beta))`,
//! which costs a handful of pointwise products per application.

use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::gabor::grid_steps;
use super::lattice::Lattice;
use crate::error::{Error, Result};
use crate::grid::{SampledFunction, SampledGrid};
use crate::linalg::tridiagonal_extremes;
use crate::quasi::SplitMix64;
use crate::{C64, MAX_DIM};

/// Walnut terms whose correlation falls below this fraction of the main term
/// are dropped.
const TERM_CUTOFF: f64 = 1e-20;

#[derive(Debug, Clone)]
pub struct FrameOperator {
    grid: SampledGrid,
    scale: f64,
    terms: Vec<([i64; MAX_DIM], Vec<C64>)>,
}

impl FrameOperator {
    pub fn new(g: &SampledFunction, lattice: &Lattice) -> Result<Self> {
        let grid = g.grid().clone();
        let steps = grid_steps(lattice, &grid)?;
        let n = grid.points() as i64;
        // samples per 1/beta
        let jump = n / steps.frequency;
        if n % steps.space != 0 || n % steps.frequency != 0 || jump * steps.frequency != n {
            return Err(Error::GridMismatch(
                "lattice steps must divide the grid into whole periods".into(),
            ));
        }
        let d = grid.dim();
        let channels = steps.frequency; // beta L shifts per period
        let peak = g.values().iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        let mut terms = Vec::new();
        let total = (channels as usize).pow(d as u32);
        for flat in 0..total {
            let mut j = [0i64; MAX_DIM];
            let mut rest = flat as i64;
            for axis in (0..d).rev() {
                let raw = rest % channels;
                rest /= channels;
                j[axis] = if raw > channels / 2 { raw - channels } else { raw };
            }
            let mut shift = [0i64; MAX_DIM];
            for axis in 0..d {
                shift[axis] = j[axis] * jump;
            }
            let moved = g.shifted(&shift);
            let product: Vec<C64> = g
                .values()
                .iter()
                .zip(moved.values())
                .map(|(a, b)| a * b.conj())
                .collect();
            let top = product.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if top <= TERM_CUTOFF * peak {
                continue;
            }
            terms.push((shift, periodize(&grid, &product, steps.space as usize)));
        }
        Ok(FrameOperator {
            grid,
            scale: lattice.beta().powi(d as i32).recip(),
            terms,
        })
    }

    pub fn grid(&self) -> &SampledGrid {
        &self.grid
    }

    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); f.len()];
        let n = self.grid.points() as i64;
        let d = self.grid.dim();
        for (shift, coeff) in &self.terms {
            for (flat, o) in out.iter_mut().enumerate() {
                let idx = self.grid.unflatten(flat);
                let mut src = [0usize; MAX_DIM];
                for axis in 0..d {
                    src[axis] = (idx[axis] as i64 - shift[axis]).rem_euclid(n) as usize;
                }
                *o += coeff[flat] * f[self.grid.flatten(&src)];
            }
        }
        for v in &mut out {
            *v *= self.scale;
        }
        out
    }

    pub fn apply_to(&self, f: &SampledFunction) -> Result<SampledFunction> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch("function and operator grids differ".into()));
        }
        self.grid.from_values(self.apply(f.values()))
    }
}

/// `sum_m p(x - alpha m)` over all shifts by `step` samples, on the periodic grid.
fn periodize(grid: &SampledGrid, p: &[C64], step: usize) -> Vec<C64> {
    let d = grid.dim();
    let residues = step.pow(d as u32);
    let residue_of = |flat: usize| {
        let idx = grid.unflatten(flat);
        (0..d).fold(0usize, |acc, axis| acc * step + idx[axis] % step)
    };
    let mut sums = vec![C64::new(0.0, 0.0); residues];
    for (flat, v) in p.iter().enumerate() {
        sums[residue_of(flat)] += v;
    }
    (0..p.len()).map(|flat| sums[residue_of(flat)]).collect()
}

/// Frame bounds: the extremal eigenvalues of the frame operator.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

impl FrameBounds {
    pub fn condition(&self) -> f64 {
        self.upper / self.lower
    }
}

/// Controls for the Krylov eigenvalue estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenConfig {
    pub max_iterations: usize,
    /// Relative change of both extremal Ritz values over one check window.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig {
            max_iterations: 300,
            tolerance: 1e-10,
            seed: 0x5eed,
        }
    }
}

/// Lower frame bounds below this are reported as "not a frame".
pub const NOT_A_FRAME: f64 = 1e-10;

pub fn frame_bounds(g: &SampledFunction, lattice: &Lattice) -> Result<FrameBounds> {
    frame_bounds_with(g, lattice, EigenConfig::default())
}

/// Extremal eigenvalues of `S` by Lanczos iteration with full
/// reorthogonalization. The Ritz values bracket the spectrum from inside and
/// converge to the extremes much faster than plain power or inverse iteration.
pub fn frame_bounds_with(
    g: &SampledFunction,
    lattice: &Lattice,
    config: EigenConfig,
) -> Result<FrameBounds> {
    let op = FrameOperator::new(g, lattice)?;
    let (lower, upper, iterations) = extremal_eigenvalues(|v| op.apply(v), g.values().len(), config)?;
    if !(lower > NOT_A_FRAME) {
        return Err(Error::NotAFrame {
            lower: lower.max(0.0),
            upper,
        });
    }
    Ok(FrameBounds {
        lower,
        upper,
        iterations,
    })
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| y.conj() * x).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn extremal_eigenvalues(
    apply: impl Fn(&[C64]) -> Vec<C64>,
    n: usize,
    config: EigenConfig,
) -> Result<(f64, f64, usize)> {
    let mut rng = SplitMix64::new(config.seed);
    let mut q: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.next_signed(), rng.next_signed()))
        .collect();
    let q_norm = norm(&q);
    q.iter_mut().for_each(|v| *v /= q_norm);
    let cap = config.max_iterations.min(n).max(1);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let check = 5;
    let mut history: Vec<(f64, f64)> = Vec::new();
    loop {
        let mut w = apply(&q);
        let a = dot(&w, &q).re;
        basis.push(q);
        alpha.push(a);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let (lo, hi) = tridiagonal_extremes(&alpha, &beta);
        history.push((lo, hi));
        let k = alpha.len();
        let b_next = norm(&w);
        let scale = hi.abs().max(lo.abs()).max(f64::MIN_POSITIVE);
        if b_next <= 1e-13 * scale || k == n {
            // invariant subspace: Ritz values are exact eigenvalues
            return Ok((lo, hi, k));
        }
        if k > check {
            let (plo, phi) = history[k - 1 - check];
            let change = ((lo - plo).abs() + (hi - phi).abs()) / scale;
            if change <= config.tolerance {
                return Ok((lo, hi, k));
            }
            if k >= cap {
                return Err(Error::NoConvergence {
                    iterations: k,
                    last_change: change,
                });
            }
        } else if k >= cap {
            return Ok((lo, hi, k));
        }
        beta.push(b_next);
        q = w.into_iter().map(|v| v / b_next).collect();
    }
}

/// Outcome of a conjugate-gradient solve.
#[derive(Debug, Clone)]
pub(crate) struct CgOutcome {
    pub solution: Vec<C64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

pub(crate) fn conjugate_gradient(
    apply: impl Fn(&[C64]) -> Vec<C64>,
    rhs: &[C64],
    tolerance: f64,
    max_iterations: usize,
) -> CgOutcome {
    let b_norm = norm(rhs);
    let mut x = vec![C64::new(0.0, 0.0); rhs.len()];
    if b_norm == 0.0 {
        return CgOutcome {
            solution: x,
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    let mut iterations = 0;
    while iterations < max_iterations {
        if rr.sqrt() <= tolerance * b_norm {
            break;
        }
        iterations += 1;
        let ap = apply(&p);
        let pap = dot(&ap, &p).re;
        if !(pap > 0.0) {
            break;
        }
        let step = rr / pap;
        for i in 0..x.len() {
            x[i] += p[i] * step;
            r[i] -= ap[i] * step;
        }
        // periodic residual replacement keeps rounding from drifting
        if iterations % 50 == 0 {
            let ax = apply(&x);
            for i in 0..r.len() {
                r[i] = rhs[i] - ax[i];
            }
        }
        let rr_next = dot(&r, &r).re;
        let ratio = rr_next / rr;
        rr = rr_next;
        for i in 0..p.len() {
            p[i] = r[i] + p[i] * ratio;
        }
    }
    let ax = apply(&x);
    let residual = norm(&rhs.iter().zip(&ax).map(|(b, a)| b - a).collect::<Vec<_>>()) / b_norm;
    CgOutcome {
        solution: x,
        iterations,
        converged: residual <= tolerance,
        residual,
    }
}

/// Relative residual target for the dual window.
pub const DUAL_TOLERANCE: f64 = 1e-10;

/// Canonical dual window `gamma = S^{-1} g`.
pub fn dual_window(g: &SampledFunction, lattice: &Lattice) -> Result<SampledFunction> {
    let op = FrameOperator::new(g, lattice)?;
    let out = conjugate_gradient(|v| op.apply(v), g.values(), DUAL_TOLERANCE, 2000);
    if !out.converged {
        let condition = match frame_bounds(g, lattice) {
            Ok(b) => b.condition(),
            Err(_) => f64::INFINITY,
        };
        return Err(Error::CgStagnation {
            iterations: out.iterations,
            residual: out.residual,
            condition,
        });
    }
    g.grid().from_values(out.solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{analysis, synthesis, Window};

    fn gaussian_setup() -> (SampledFunction, Lattice) {
        let grid = SampledGrid::new(1, 256, 32.0).unwrap();
        let g = Window::gaussian(1).unwrap().sample(&grid).unwrap();
        (g, Lattice::standard(1, 6).unwrap())
    }

    #[test]
    fn walnut_form_matches_explicit_sum() {
        // explicit S f = sum over the full periodic lattice
        let grid = SampledGrid::new(1, 64, 16.0).unwrap();
        let g = Window::gaussian(1).unwrap().sample(&grid).unwrap();
        let lattice = Lattice::standard(1, 1).unwrap();
        let op = FrameOperator::new(&g, &lattice).unwrap();
        let f = grid.sample(|x| C64::new((-(x[0] - 1.0).powi(2)).exp(), 0.3 * x[0].cos()));
        let mut explicit = grid.zeros();
        let h = grid.spacing();
        let channels = (1.0 / (0.5 * h)).round() as i64;
        for m in 0..16i64 {
            for n in 0..channels {
                let atom = grid.sample(|x| {
                    let mut y = x[0] - m as f64;
                    y -= 16.0 * ((y + 8.0) / 16.0).floor();
                    C64::from_polar(
                        Window::gaussian(1).unwrap().value(&[y]),
                        2.0 * core::f64::consts::PI * 0.5 * n as f64 * x[0],
                    )
                });
                let c = f.inner(&atom);
                explicit = explicit.add(&atom.scale(c));
            }
        }
        let walnut = op.apply_to(&f).unwrap();
        assert!(walnut.max_abs_diff(&explicit) < 1e-10 * explicit.norm());
    }

    #[test]
    fn gaussian_bounds_are_positive_and_finite() {
        let (g, lattice) = gaussian_setup();
        let b = frame_bounds(&g, &lattice).unwrap();
        assert!(b.lower > 0.1 && b.upper < 10.0 && b.lower <= b.upper);
        let g2 = g.scale(C64::new(2.0, 0.0));
        let b2 = frame_bounds(&g2, &lattice).unwrap();
        assert!((b2.lower / b.lower - 4.0).abs() < 1e-7);
        assert!((b2.upper / b.upper - 4.0).abs() < 1e-7);
    }

    #[test]
    fn undersampled_lattice_is_not_a_frame() {
        let (g, _) = gaussian_setup();
        let lattice = Lattice::new(1, 2.0, 2.0, 1).unwrap();
        assert!(matches!(frame_bounds(&g, &lattice), Err(Error::NotAFrame { .. })));
    }

    #[test]
    fn orthonormal_system_has_identity_frame_operator() {
        let grid = SampledGrid::new(1, 256, 32.0).unwrap();
        let chi = grid.sample(|x| C64::new(if (0.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 }, 0.0));
        let lattice = Lattice::new(1, 1.0, 1.0, 3).unwrap();
        let b = frame_bounds(&chi, &lattice).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-12 && (b.upper - 1.0).abs() < 1e-12);
        let gamma = dual_window(&chi, &lattice).unwrap();
        assert!(gamma.max_abs_diff(&chi) < 1e-12);
    }

    #[test]
    fn dual_window_reconstructs() {
        let (g, lattice) = gaussian_setup();
        let gamma = dual_window(&g, &lattice).unwrap();
        let op = FrameOperator::new(&g, &lattice).unwrap();
        let res = op.apply_to(&gamma).unwrap().sub(&g).norm() / g.norm();
        assert!(res <= DUAL_TOLERANCE);
        let grid = g.grid();
        for (flat, v) in gamma.values().iter().enumerate() {
            if grid.point(flat)[0].abs() > 6.0 {
                assert!(v.norm() < 1e-6);
            }
        }
        let f = grid.sample(|x| C64::new((-2.0 * (x[0] + 0.5).powi(2)).exp(), (-(x[0] - 1.0).powi(2)).exp() * 0.5));
        let rec = synthesis(&analysis(&f, &g, &lattice).unwrap(), &gamma).unwrap();
        assert!(rec.relative_error(&f) < 1e-6);
    }

    #[test]
    fn dual_of_scaled_window() {
        let (g, lattice) = gaussian_setup();
        let gamma = dual_window(&g, &lattice).unwrap();
        let gamma3 = dual_window(&g.scale(C64::new(3.0, 0.0)), &lattice).unwrap();
        assert!(gamma3.scale(C64::new(3.0, 0.0)).relative_error(&gamma) < 1e-9);
    }
}
