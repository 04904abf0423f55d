use gaborprop::propagators::{decay_class, hp_check, DecayClass, HpReport, HpSampler};
use serde::Serialize;

use super::{operator_label, principal_exponent};
use crate::config::RunConfig;
use crate::failure::Failure;
use crate::output::{print_json, Output};

/// Default candidate constant.
pub const CANDIDATE_C: f64 = 1e3;

#[derive(Debug, Serialize)]
struct HpOutput<'a> {
    operator: String,
    dim: usize,
    #[serde(flatten)]
    report: &'a HpReport,
    decay_class: Option<DecayClass>,
}

pub fn run(cfg: &RunConfig) -> Result<(), Failure> {
    let d = cfg.operator_dim(1)?;
    let symbol = cfg.symbol(d)?;
    let out = Output::new(cfg.out.as_deref())?;
    let sampler = HpSampler {
        samples: cfg.samples.unwrap_or(2000),
        seed: cfg.seed(),
        ..HpSampler::default()
    };
    let report = hp_check(
        symbol.operator(),
        cfg.candidate_c.unwrap_or(CANDIDATE_C),
        cfg.candidate_nu.unwrap_or_else(|| principal_exponent(symbol.operator())),
        &sampler,
    )?;
    let output = HpOutput {
        operator: operator_label(&symbol),
        dim: d,
        report: &report,
        decay_class: decay_class(report.nu_estimate).ok(),
    };
    print_json(&output)?;
    out.json("hp.json", &output)
}
