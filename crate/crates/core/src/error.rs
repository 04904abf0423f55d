use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor or operation received an argument outside its domain.
    InvalidArgument(String),
    /// Grid spacing/period and lattice steps do not line up exactly.
    GridMismatch(String),
    /// A time-frequency shift reaches beyond the grid's Nyquist band.
    FrequencyAliasing { frequency: f64, nyquist: f64 },
    /// An iterative eigenvalue estimate did not settle within its cap.
    NoConvergence { iterations: usize, last_change: f64 },
    /// The lower frame bound vanished at this truncation.
    NotAFrame { lower: f64, upper: f64 },
    /// Conjugate gradients stopped above the requested residual.
    CgStagnation { iterations: usize, residual: f64, condition: f64 },
    /// A propagator symbol left the floating point range.
    SymbolOverflow { t: f64 },
    /// The operator polynomial is not monic in the time variable.
    DegenerateLeading(String),
    /// Too few samples above the noise floor to fit a decay law.
    InsufficientDynamicRange { available: usize, required: usize },
    /// A fitted decay rate was not positive.
    NotDecaying { epsilon: f64 },
    /// Cauchy data carry too much mass near the edge of the grid.
    DataNotLocalized { edge_fraction: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::GridMismatch(msg) => write!(f, "grid/lattice mismatch: {msg}"),
            Error::FrequencyAliasing { frequency, nyquist } => write!(
                f,
                "frequency {frequency} aliases on a grid with Nyquist band {nyquist}"
            ),
            Error::NoConvergence {
                iterations,
                last_change,
            } => write!(
                f,
                "eigenvalue iteration did not converge after {iterations} steps (last relative change {last_change:e})"
            ),
            Error::NotAFrame { lower, upper } => write!(
                f,
                "not a frame at this truncation: lower bound {lower:e}, upper bound {upper:e}"
            ),
            Error::CgStagnation {
                iterations,
                residual,
                condition,
            } => write!(
                f,
                "conjugate gradients stagnated after {iterations} iterations at relative residual {residual:e} (condition estimate {condition:e})"
            ),
            Error::SymbolOverflow { t } => write!(f, "propagator symbol overflows at t = {t}"),
            Error::DegenerateLeading(msg) => write!(f, "degenerate leading coefficient: {msg}"),
            Error::InsufficientDynamicRange {
                available,
                required,
            } => write!(
                f,
                "insufficient dynamic range: {available} samples above the noise floor, {required} required"
            ),
            Error::NotDecaying { epsilon } => {
                write!(f, "fit rejected: decay rate {epsilon:e} is not positive")
            }
            Error::DataNotLocalized { edge_fraction } => write!(
                f,
                "Cauchy data not localized: {edge_fraction:e} of the L2 mass sits at the grid edge"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
