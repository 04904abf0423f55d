//! Frame bounds and dual-window residual of the Gaussian window.

use gaborprop::frames::{dual_window, frame_bounds_with, EigenConfig, FrameBounds, FrameOperator, Window};
use serde::Serialize;

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::output::Output;

#[derive(Debug, Serialize)]
pub struct FrameReport {
    pub dim: usize,
    pub alpha: f64,
    pub beta: f64,
    pub box_radius: usize,
    pub grid: usize,
    pub period: f64,
    pub window: String,
    pub bounds: FrameBounds,
    pub condition: f64,
    pub dual_residual: f64,
}

pub fn run(cfg: &RunConfig) -> Result<(), Failure> {
    let d = cfg.dim(1);
    let lattice = cfg.lattice(d, 6)?;
    let grid = cfg.sampled_grid(d)?;
    let window = Window::gaussian(d)?;
    let out = Output::new(cfg.out.as_deref())?;
    let g = window.sample(&grid)?;
    let bounds = frame_bounds_with(
        &g,
        &lattice,
        EigenConfig {
            seed: cfg.seed(),
            ..EigenConfig::default()
        },
    )?;
    let gamma = dual_window(&g, &lattice)?;
    let residual = FrameOperator::new(&g, &lattice)?.apply_to(&gamma)?.sub(&g).norm() / g.norm();
    let report = FrameReport {
        dim: d,
        alpha: lattice.alpha(),
        beta: lattice.beta(),
        box_radius: lattice.box_radius(),
        grid: grid.points(),
        period: grid.period(),
        window: window.label(),
        bounds,
        condition: bounds.condition(),
        dual_residual: residual,
    };
    println!("window          {}", report.window);
    println!(
        "lattice         alpha = {}, beta = {}, box radius {}, d = {}",
        report.alpha, report.beta, report.box_radius, report.dim
    );
    println!("grid            {} points per axis, period {}", report.grid, report.period);
    println!("lower bound A   {:.10}", bounds.lower);
    println!("upper bound B   {:.10}", bounds.upper);
    println!("condition B/A   {:.6}", report.condition);
    println!("dual residual   {:.3e}", report.dual_residual);
    out.json("frame.json", &report)
}
