//! Assembles one Gabor matrix, exports it and fits its decay laws.

use gaborprop::fit::{DecayFit, NOISE_FLOOR};
use gaborprop::frames::{LatticeIndex, Window};
use gaborprop::gabor_matrix::{
    assemble, column_decay, offdiag_candidates, offdiag_fit, sorted_magnitudes, AssemblyOptions, MatrixMetadata,
    ENTRY_FLOOR,
};
use gaborprop::propagators::{decay_class, hp_check, HpSampler, MultiplierSymbol, SymbolKind};
use serde::Serialize;

use super::principal_exponent;
use crate::config::RunConfig;
use crate::failure::Failure;
use crate::output::{coo_rows, print_json, sorted_rows, Output, EXPORT_LIMIT};

#[derive(Debug, Serialize)]
struct FitOutcome {
    fit: Option<DecayFit>,
    /// Why the fit is missing.
    skipped: Option<String>,
}

impl FitOutcome {
    fn from(result: Result<DecayFit, String>) -> Self {
        match result {
            Ok(fit) => FitOutcome { fit: Some(fit), skipped: None },
            Err(reason) => FitOutcome { fit: None, skipped: Some(reason) },
        }
    }
}

#[derive(Debug, Serialize)]
struct Theory {
    nu: f64,
    /// `operator` for the named families, `hp_estimate` for operator files.
    nu_source: &'static str,
    r: f64,
    /// Gelfand–Shilov index `1/r` used for the sorted-column exponent.
    s: f64,
}

#[derive(Debug, Serialize)]
struct MatrixSummary {
    metadata: MatrixMetadata,
    theory: Option<Theory>,
    offdiag_fit: FitOutcome,
    column_decay: FitOutcome,
}

fn theory(symbol: &MultiplierSymbol, seed: u64) -> Result<Option<Theory>, Failure> {
    let (nu, nu_source) = match symbol.kind() {
        SymbolKind::Generic(op) => {
            let sampler = HpSampler { seed, ..HpSampler::default() };
            let report = hp_check(op, 1e3, principal_exponent(op), &sampler)?;
            (report.nu_estimate, "hp_estimate")
        }
        _ => (principal_exponent(symbol.operator()), "operator"),
    };
    Ok(decay_class(nu).ok().map(|c| Theory {
        nu,
        nu_source,
        r: c.r,
        s: 1.0 / c.r,
    }))
}

pub fn run(cfg: &RunConfig) -> Result<(), Failure> {
    let d = cfg.operator_dim(1)?;
    let symbol = cfg.symbol(d)?;
    let lattice = cfg.lattice(d, 6)?;
    let t = cfg.single_time(0.5)?;
    let theta = cfg.single_threshold()?;
    let out = Output::new(cfg.out.as_deref())?;
    let mut options = if theta > 0.0 { AssemblyOptions::sparse(theta) } else { AssemblyOptions::default() };
    if let Some(margin) = cfg.space_margin {
        options.quadrature.space_margin = margin;
    }
    let m = assemble(&symbol, t, &Window::gaussian(d)?, &lattice, &options)?;
    if m.flagged_entries() > 0 {
        eprintln!(
            "warning: {} entries failed the quadrature cross-check; a larger --space-margin usually clears them",
            m.flagged_entries()
        );
    }
    let theory = theory(&symbol, cfg.seed())?;

    let offdiag = offdiag_fit(&m, &offdiag_candidates(), ENTRY_FLOOR, theory.as_ref().map(|th| th.r))
        .map(|f| f.fit)
        .map_err(|e| e.to_string());
    let origin = LatticeIndex::new(&[0; 4][..d], &[0; 4][..d]);
    let sorted = sorted_magnitudes(&m.column(&origin).iter().map(|(_, v)| v.norm()).collect::<Vec<_>>());
    let column = match &theory {
        Some(th) => column_decay(&sorted, d, th.s, NOISE_FLOOR).map(|c| c.fit).map_err(|e| e.to_string()),
        None => Err("no decay class for this operator".to_string()),
    };
    let summary = MatrixSummary {
        metadata: m.metadata(),
        theory,
        offdiag_fit: FitOutcome::from(offdiag),
        column_decay: FitOutcome::from(column),
    };
    print_json(&summary)?;

    if out.enabled() {
        if m.nnz() > EXPORT_LIMIT {
            return Err(Failure::config(format!(
                "{} stored entries exceed the export limit of {EXPORT_LIMIT}; raise --theta or lower --box-radius",
                m.nnz()
            )));
        }
        out.csv("matrix.csv", |w| coo_rows(w, &m))?;
        out.json("matrix.json", &summary.metadata)?;
        out.json("fits.json", &summary)?;
        out.csv("column_decay.csv", |w| sorted_rows(w, &sorted, t))?;
    }
    Ok(())
}
