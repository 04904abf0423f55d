use clap::ValueEnum;
use gaborprop::fit::DecayFit;
use gaborprop::gabor_matrix::{figure_data, FigureKind, FigureParams, FigureSeries};
use serde::Serialize;

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::output::{figure_rows, stdout_csv, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// Sorted column of the wave bound matrix, d = 2, t = 0.75
    Fig1,
    /// Sorted heat-propagator columns, d = 2, several times
    Fig2,
}

impl Which {
    fn name(self) -> &'static str {
        match self {
            Which::Fig1 => "fig1",
            Which::Fig2 => "fig2",
        }
    }

    fn kind(self) -> FigureKind {
        match self {
            Which::Fig1 => FigureKind::Fig1Wave,
            Which::Fig2 => FigureKind::Fig2Heat,
        }
    }

    /// The series written to the main CSV.
    fn primary(self) -> &'static str {
        match self {
            Which::Fig1 => "bound",
            Which::Fig2 => "assembled",
        }
    }
}

#[derive(Debug, Serialize)]
struct SeriesFit<'a> {
    t: f64,
    source: &'a str,
    entries: usize,
    fit: Option<DecayFit>,
}

pub fn params(which: Which, cfg: &RunConfig) -> FigureParams {
    let mut p = FigureParams::defaults(which.kind());
    p.dim = cfg.dim(p.dim);
    p.box_radius = cfg.box_radius.unwrap_or(p.box_radius);
    p.times = cfg.times(&p.times);
    p.include_assembled = cfg.assembled.unwrap_or(false);
    if let Some(margin) = cfg.space_margin {
        p.quadrature.space_margin = margin;
    }
    p
}

pub fn run(which: Which, cfg: &RunConfig) -> Result<(), Failure> {
    if cfg.alpha.is_some() || cfg.beta.is_some() {
        return Err(Failure::config("figures use the lattice Z^d x (1/2)Z^d; alpha and beta cannot be changed"));
    }
    let out = Output::new(cfg.out.as_deref())?;
    let series = figure_data(which.kind(), &params(which, cfg))?;
    let (primary, extra): (Vec<&FigureSeries>, Vec<&FigureSeries>) =
        series.iter().partition(|s| s.source == which.primary());
    out.csv(&format!("{}.csv", which.name()), |w| figure_rows(w, &primary))?;
    if !extra.is_empty() {
        out.csv(&format!("{}_assembled.csv", which.name()), |w| figure_rows(w, &extra))?;
    }
    let fits: Vec<SeriesFit> = series
        .iter()
        .map(|s| SeriesFit {
            t: s.t,
            source: &s.source,
            entries: s.sorted.len(),
            fit: s.fit,
        })
        .collect();
    out.json(&format!("{}_fits.json", which.name()), &fits)?;
    stdout_csv(|w| figure_rows(w, &primary))
}
