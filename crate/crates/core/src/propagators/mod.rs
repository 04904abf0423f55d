//! Constant-coefficient evolution operators, their propagator symbols and
//! the Hadamard–Petrowsky sampler.

mod hp;
mod operator;
mod polynomial;
mod symbol;

pub use hp::{decay_class, hp_check, DecayClass, HpReport, HpSampler, HpWorst};
pub use operator::EvolutionOperator;
pub use polynomial::{Monomial, Polynomial};
pub use symbol::{
    symbol_eval, symbol_time_derivatives, MultiplierSymbol, SymbolKind, SymbolValue,
};
