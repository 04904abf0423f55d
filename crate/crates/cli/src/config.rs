//! Run configuration. A JSON file supplies any subset of the fields; flags
//! given on the command line replace the file's values field by field.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use gaborprop::frames::Lattice;
use gaborprop::grid::SampledGrid;
use gaborprop::propagators::{MultiplierSymbol, SymbolKind};
use gaborprop::MAX_DIM;
use serde::{Deserialize, Deserializer, Serialize};

use crate::failure::Failure;
use crate::operator_file;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Kind {
    Wave,
    KleinGordon,
    Heat,
    PolyHeat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    /// `u_k = x_1^k e^{-pi |x|^2}`
    Gaussian,
    /// `u_k = h_{k+1}(x_1) h_0(x_2) ...`
    Hermite,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: Option<Kind>,
    pub k: Option<u32>,
    pub mass: Option<f64>,
    pub operator_file: Option<PathBuf>,
    pub d: Option<usize>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub t: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub box_radius: Option<usize>,
    pub grid: Option<usize>,
    pub period: Option<f64>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub theta: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub candidate_c: Option<f64>,
    pub candidate_nu: Option<f64>,
    pub space_margin: Option<f64>,
    pub data: Option<DataKind>,
    pub assembled: Option<bool>,
}

fn one_or_many<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Vec<f64>>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(Option::<OneOrMany>::deserialize(de)?.map(|v| match v {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(xs) => xs,
    }))
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON configuration file with any of the fields below (snake_case); flags override it
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Named operator
    #[arg(long, global = true, value_enum)]
    pub kind: Option<Kind>,
    /// Power k of poly_heat, d_t + (-Laplacian)^k [default: 2]
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Klein-Gordon mass [default: 1]
    #[arg(long, global = true)]
    pub mass: Option<f64>,
    /// JSON operator description, used instead of --kind
    #[arg(long, global = true, value_name = "FILE")]
    pub operator_file: Option<PathBuf>,
    /// Spatial dimension, 1 to 4 [default: 2 for figure, 1 otherwise]
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Time; a comma-separated list for figure [default: matrix 0.5, solve 0.1, fig1 0.75, fig2 0,0.25,0.75,1.5]
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Option<Vec<f64>>,
    /// Lattice step in space [default: 1]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Lattice step in frequency [default: 0.5]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Lattice box radius R, indices in [-R, R] [default: 10 for figure, 6 otherwise]
    #[arg(long, global = true)]
    pub box_radius: Option<usize>,
    /// Grid points per axis, a power of two [default: 1024 for d=1, 256 otherwise]
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Grid period per axis [default: 32 for d=1, 16 otherwise]
    #[arg(long, global = true)]
    pub period: Option<f64>,
    /// Threshold; a comma-separated list for solve [default: matrix 0 (dense), solve 1e-2,1e-4,1e-6,1e-8,1e-10,0]
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Option<Vec<f64>>,
    /// Output directory for CSV and JSON files [default: none, primary table on standard output only]
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads [default: one per core]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for the HP sample offset and the frame-bound start vector [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// HP sample count [default: 2000]
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// HP candidate constant C [default: 1000]
    #[arg(long, global = true)]
    pub candidate_c: Option<f64>,
    /// HP candidate exponent nu [default: max over k of deg(a_k)/k]
    #[arg(long, global = true)]
    pub candidate_nu: Option<f64>,
    /// Distance in space between the largest shift and the coarse quadrature alias [default: 6]
    #[arg(long, global = true)]
    pub space_margin: Option<f64>,
    /// Cauchy data for solve [default: gaussian]
    #[arg(long, global = true, value_enum)]
    pub data: Option<DataKind>,
    /// Also emit the assembled wave column for fig1
    #[arg(long, global = true)]
    pub assembled: bool,
}

impl Flags {
    fn into_config(self) -> RunConfig {
        RunConfig {
            kind: self.kind,
            k: self.k,
            mass: self.mass,
            operator_file: self.operator_file,
            d: self.d,
            t: self.t,
            alpha: self.alpha,
            beta: self.beta,
            box_radius: self.box_radius,
            grid: self.grid,
            period: self.period,
            theta: self.theta,
            out: self.out,
            threads: self.threads,
            seed: self.seed,
            samples: self.samples,
            candidate_c: self.candidate_c,
            candidate_nu: self.candidate_nu,
            space_margin: self.space_margin,
            data: self.data,
            assembled: self.assembled.then_some(true),
        }
    }
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    /// Reads the optional config file, lays the flags over it and validates.
    pub fn load(mut flags: Flags) -> Result<RunConfig, Failure> {
        let base = match flags.config.take() {
            Some(path) => Self::from_file(&path)?,
            None => RunConfig::default(),
        };
        let cfg = base.overlay(flags.into_config());
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<RunConfig, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Failure::io(path, e))
    }

    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(base, top; kind, k, mass, operator_file, d, t, alpha, beta, box_radius, grid, period,
            theta, out, threads, seed, samples, candidate_c, candidate_nu, space_margin, data, assembled)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        fn positive(name: &str, v: Option<f64>) -> Result<(), Failure> {
            match v {
                Some(x) if !(x > 0.0 && x.is_finite()) => Err(Failure::config(format!("{name} must be positive, got {x}"))),
                _ => Ok(()),
            }
        }
        fn nonnegative(name: &str, v: &Option<Vec<f64>>) -> Result<(), Failure> {
            match v.iter().flatten().find(|x| !(**x >= 0.0 && x.is_finite())) {
                Some(x) => Err(Failure::config(format!("{name} values must be finite and nonnegative, got {x}"))),
                None => Ok(()),
            }
        }
        positive("alpha", self.alpha)?;
        positive("beta", self.beta)?;
        positive("period", self.period)?;
        positive("mass", self.mass)?;
        positive("candidate_c", self.candidate_c)?;
        positive("space_margin", self.space_margin)?;
        nonnegative("t", &self.t)?;
        nonnegative("theta", &self.theta)?;
        if let Some(nu) = self.candidate_nu {
            if !(nu >= 0.0 && nu.is_finite()) {
                return Err(Failure::config(format!("candidate_nu must be nonnegative, got {nu}")));
            }
        }
        if let Some(d) = self.d {
            if d == 0 || d > MAX_DIM {
                return Err(Failure::config(format!("d must be between 1 and {MAX_DIM}, got {d}")));
            }
        }
        if self.box_radius == Some(0) {
            return Err(Failure::config("box_radius must be at least 1"));
        }
        if let Some(n) = self.grid {
            if n < 2 || !n.is_power_of_two() {
                return Err(Failure::config(format!("grid must be a power of two, got {n}")));
            }
        }
        if self.k == Some(0) {
            return Err(Failure::config("k must be at least 1"));
        }
        if self.samples == Some(0) {
            return Err(Failure::config("samples must be at least 1"));
        }
        if matches!(self.t.as_deref(), Some([])) || matches!(self.theta.as_deref(), Some([])) {
            return Err(Failure::config("t and theta lists must not be empty"));
        }
        if self.kind.is_some() && self.operator_file.is_some() {
            return Err(Failure::config("give either kind or operator_file, not both"));
        }
        if self.k.is_some() && self.kind != Some(Kind::PolyHeat) {
            return Err(Failure::config("k applies to kind poly_heat only"));
        }
        if self.mass.is_some() && self.kind != Some(Kind::KleinGordon) {
            return Err(Failure::config("mass applies to kind klein_gordon only"));
        }
        Ok(())
    }

    pub fn dim(&self, default: usize) -> usize {
        self.d.unwrap_or(default)
    }

    pub fn lattice(&self, d: usize, default_radius: usize) -> Result<Lattice, Failure> {
        Ok(Lattice::new(
            d,
            self.alpha.unwrap_or(1.0),
            self.beta.unwrap_or(0.5),
            self.box_radius.unwrap_or(default_radius),
        )?)
    }

    pub fn sampled_grid(&self, d: usize) -> Result<SampledGrid, Failure> {
        let (points, period) = if d == 1 { (1024, 32.0) } else { (256, 16.0) };
        Ok(SampledGrid::new(d, self.grid.unwrap_or(points), self.period.unwrap_or(period))?)
    }

    pub fn symbol(&self, d: usize) -> Result<MultiplierSymbol, Failure> {
        let kind = match (&self.kind, &self.operator_file) {
            (Some(Kind::Wave), _) => SymbolKind::Wave,
            (Some(Kind::Heat), _) => SymbolKind::Heat,
            (Some(Kind::KleinGordon), _) => SymbolKind::KleinGordon {
                mass: self.mass.unwrap_or(1.0),
            },
            (Some(Kind::PolyHeat), _) => SymbolKind::PolyHeat { k: self.k.unwrap_or(2) },
            (None, Some(path)) => {
                let op = operator_file::load(path)?;
                if self.d.is_some_and(|d| d != op.dim()) {
                    return Err(Failure::config(format!(
                        "d = {d} differs from the operator file's d = {}",
                        op.dim()
                    )));
                }
                return Ok(MultiplierSymbol::generic(op));
            }
            (None, None) => return Err(Failure::config("an operator is required: give kind or operator_file")),
        };
        Ok(MultiplierSymbol::new(kind, d)?)
    }

    /// The operator's dimension: from the operator file when one is given.
    pub fn operator_dim(&self, default: usize) -> Result<usize, Failure> {
        match (&self.operator_file, self.d) {
            (Some(path), None) => Ok(operator_file::load(path)?.dim()),
            _ => Ok(self.dim(default)),
        }
    }

    pub fn single_time(&self, default: f64) -> Result<f64, Failure> {
        match self.t.as_deref() {
            None => Ok(default),
            Some([t]) => Ok(*t),
            Some(_) => Err(Failure::config("this command takes a single time t")),
        }
    }

    pub fn times(&self, default: &[f64]) -> Vec<f64> {
        self.t.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn single_threshold(&self) -> Result<f64, Failure> {
        match self.theta.as_deref() {
            None => Ok(0.0),
            Some([theta]) => Ok(*theta),
            Some(_) => Err(Failure::config("this command takes a single threshold theta")),
        }
    }

    /// Thresholds sorted from largest to smallest.
    pub fn thresholds(&self, default: &[f64]) -> Vec<f64> {
        let mut thetas = self.theta.clone().unwrap_or_else(|| default.to_vec());
        thetas.sort_by(|a, b| b.total_cmp(a));
        thetas
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_fields() {
        let file: RunConfig = serde_json::from_str(r#"{"kind": "heat", "t": 0.3, "alpha": 0.5, "theta": [1e-3, 1e-6]}"#).unwrap();
        assert_eq!(file.t, Some(vec![0.3]));
        let flags = RunConfig {
            alpha: Some(1.0),
            ..RunConfig::default()
        };
        let cfg = file.overlay(flags);
        assert_eq!(cfg.alpha, Some(1.0));
        assert_eq!(cfg.kind, Some(Kind::Heat));
        assert_eq!(cfg.thresholds(&[]), vec![1e-3, 1e-6]);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"kindd": "heat"}"#).is_err());
    }

    #[test]
    fn validation() {
        let bad = [
            RunConfig { alpha: Some(0.0), ..Default::default() },
            RunConfig { beta: Some(-1.0), ..Default::default() },
            RunConfig { grid: Some(1000), ..Default::default() },
            RunConfig { d: Some(5), ..Default::default() },
            RunConfig { t: Some(vec![-0.1]), ..Default::default() },
            RunConfig { theta: Some(vec![]), ..Default::default() },
            RunConfig { k: Some(3), kind: Some(Kind::Heat), ..Default::default() },
            RunConfig { box_radius: Some(0), ..Default::default() },
        ];
        for cfg in bad {
            assert_eq!(cfg.validate().unwrap_err().exit_code(), 2, "{cfg:?}");
        }
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn defaults_and_lists() {
        let cfg = RunConfig { kind: Some(Kind::PolyHeat), ..Default::default() };
        assert_eq!(cfg.symbol(1).unwrap(), MultiplierSymbol::poly_heat(1, 2).unwrap());
        let lat = cfg.lattice(1, 6).unwrap();
        assert_eq!((lat.alpha(), lat.beta(), lat.box_radius()), (1.0, 0.5, 6));
        let grid = cfg.sampled_grid(2).unwrap();
        assert_eq!((grid.points(), grid.period()), (256, 16.0));
        assert_eq!(cfg.thresholds(&[0.0, 1e-2, 1e-6]), vec![1e-2, 1e-6, 0.0]);
        let many = RunConfig { t: Some(vec![0.1, 0.2]), ..Default::default() };
        assert!(many.single_time(0.5).is_err());
        assert!(RunConfig::default().symbol(1).is_err());
    }
}
