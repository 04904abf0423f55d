use std::fmt;
use std::path::Path;

use gaborprop::Error;

/// Why a command stopped. Configuration problems exit with 2, numerical
/// failures with 1.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    pub fn config(msg: impl Into<String>) -> Self {
        Failure::Config(msg.into())
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Failure::Config(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Numerical(_) => 1,
            Failure::Config(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(msg) => write!(f, "configuration error: {msg}"),
            Failure::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::GridMismatch(_)
            | Error::FrequencyAliasing { .. }
            | Error::DegenerateLeading(_)
            | Error::DataNotLocalized { .. } => Failure::Config(e.to_string()),
            Error::NoConvergence { .. }
            | Error::NotAFrame { .. }
            | Error::CgStagnation { .. }
            | Error::SymbolOverflow { .. }
            | Error::InsufficientDynamicRange { .. }
            | Error::NotDecaying { .. } => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Config(format!("writing CSV: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(Failure::from(Error::InvalidArgument("x".into())).exit_code(), 2);
        assert_eq!(Failure::from(Error::FrequencyAliasing { frequency: 9.0, nyquist: 8.0 }).exit_code(), 2);
        assert_eq!(Failure::from(Error::NotAFrame { lower: 0.0, upper: 1.0 }).exit_code(), 1);
        assert_eq!(Failure::from(Error::SymbolOverflow { t: 1.0 }).exit_code(), 1);
    }
}
