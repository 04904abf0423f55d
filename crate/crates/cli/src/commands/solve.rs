//! Cauchy problem through the thresholded Gabor matrix, swept over thresholds.

use std::f64::consts::PI;

use gaborprop::frames::{FrameBounds, Window};
use gaborprop::grid::{SampledFunction, SampledGrid};
use gaborprop::solver::{CauchyData, GaborPropagator, GaborSetup, SolveMethod, SweepRow};
use gaborprop::Complex64;
use serde::Serialize;

use super::operator_label;
use crate::config::{DataKind, RunConfig};
use crate::failure::Failure;
use crate::output::{solution_rows, stdout_csv, sweep_rows, Output};

pub const DEFAULT_THRESHOLDS: [f64; 6] = [1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 0.0];

#[derive(Debug, Serialize)]
struct Row {
    theta: f64,
    nnz: usize,
    rel_l2_error: f64,
    /// Dense error plus the thresholding bound.
    error_bound: f64,
    dropped_mass: f64,
}

#[derive(Debug, Serialize)]
struct SolveSummary {
    operator: String,
    dim: usize,
    t: f64,
    data: DataKind,
    alpha: f64,
    beta: f64,
    box_radius: usize,
    grid: usize,
    period: f64,
    frame_bounds: FrameBounds,
    dense_size: usize,
    /// Method behind `solution.csv`.
    solution_method: SolveMethod,
    rows: Vec<Row>,
    warnings: Vec<String>,
}

/// Cauchy data `u_0, ..., u_{m-1}`.
pub fn cauchy_data(kind: DataKind, order: usize, grid: &SampledGrid) -> Result<Vec<SampledFunction>, Failure> {
    (0..order)
        .map(|k| match kind {
            DataKind::Gaussian => Ok(grid.sample(|x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                Complex64::new(x[0].powi(k as i32) * (-PI * r2).exp(), 0.0)
            })),
            DataKind::Hermite => {
                let mut orders = vec![0; grid.dim()];
                orders[0] = k as u32 + 1;
                Ok(Window::hermite(&orders)?.sample(grid)?)
            }
        })
        .collect()
}

pub fn run(cfg: &RunConfig) -> Result<(), Failure> {
    let d = cfg.operator_dim(1)?;
    let symbol = cfg.symbol(d)?;
    let lattice = cfg.lattice(d, 6)?;
    let grid = cfg.sampled_grid(d)?;
    let t = cfg.single_time(0.1)?;
    let thetas = cfg.thresholds(&DEFAULT_THRESHOLDS);
    let data_kind = cfg.data.unwrap_or(DataKind::Gaussian);
    let out = Output::new(cfg.out.as_deref())?;

    let label = operator_label(&symbol);
    let order = symbol.order();
    let data = CauchyData::new(symbol, cauchy_data(data_kind, order, &grid)?)?;
    let setup = GaborSetup::new(&Window::gaussian(d)?, &lattice, &grid)?;
    let propagator = GaborPropagator::new(&data, t, &setup)?;
    let dense = propagator.solve(0.0)?;
    let dense_error = dense.relative_error.unwrap_or(f64::NAN);

    let mut rows = Vec::with_capacity(thetas.len());
    let mut last = dense;
    for &theta in &thetas {
        let report = propagator.solve(theta)?;
        rows.push(Row {
            theta,
            nnz: report.nnz,
            rel_l2_error: report.relative_error.unwrap_or(f64::NAN),
            error_bound: dense_error + propagator.threshold_error_bound(theta),
            dropped_mass: report.dropped_mass,
        });
        last = report;
    }
    for w in &last.warnings {
        eprintln!("warning: {w}");
    }
    let sweep: Vec<SweepRow> = rows
        .iter()
        .map(|r| SweepRow {
            theta: r.theta,
            nnz: r.nnz,
            rel_l2_error: r.rel_l2_error,
        })
        .collect();

    let summary = SolveSummary {
        operator: label,
        dim: d,
        t,
        data: data_kind,
        alpha: lattice.alpha(),
        beta: lattice.beta(),
        box_radius: lattice.box_radius(),
        grid: grid.points(),
        period: grid.period(),
        frame_bounds: setup.bounds,
        dense_size: last.dense_size,
        solution_method: last.method,
        rows,
        warnings: last.warnings.clone(),
    };
    out.csv("sweep.csv", |w| sweep_rows(w, &sweep))?;
    out.csv("solution.csv", |w| solution_rows(w, &last.solution))?;
    out.csv("reference.csv", |w| solution_rows(w, propagator.reference()))?;
    out.json("report.json", &summary)?;
    stdout_csv(|w| sweep_rows(w, &sweep))
}
