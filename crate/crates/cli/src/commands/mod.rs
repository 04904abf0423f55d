pub mod figure;
pub mod frame;
pub mod hp;
pub mod matrix;
pub mod solve;

use gaborprop::propagators::{EvolutionOperator, MultiplierSymbol, SymbolKind};

/// Display name with the family parameter, e.g. `poly_heat(k=2)`.
pub fn operator_label(symbol: &MultiplierSymbol) -> String {
    match symbol.kind() {
        SymbolKind::PolyHeat { k } => format!("poly_heat(k={k})"),
        SymbolKind::KleinGordon { mass } => format!("klein_gordon(mass={mass})"),
        _ => symbol.name().to_string(),
    }
}

/// `max_k deg(a_k) / k`: the growth exponent of the time roots, which is the
/// Hadamard–Petrowsky exponent for each named family and a safe candidate
/// otherwise. Never below 1.
pub fn principal_exponent(op: &EvolutionOperator) -> f64 {
    op.coefficients()
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(i, p)| p.degree() as f64 / (i + 1) as f64)
        .fold(1.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents_of_named_families() {
        let nu = |op: EvolutionOperator| principal_exponent(&op);
        assert_eq!(nu(EvolutionOperator::heat(1).unwrap()), 2.0);
        assert_eq!(nu(EvolutionOperator::wave(2).unwrap()), 1.0);
        assert_eq!(nu(EvolutionOperator::klein_gordon(1, 1.0).unwrap()), 1.0);
        assert_eq!(nu(EvolutionOperator::poly_heat(1, 3).unwrap()), 6.0);
        assert_eq!(nu(EvolutionOperator::time_derivative(1).unwrap()), 1.0);
    }

    #[test]
    fn labels() {
        assert_eq!(operator_label(&MultiplierSymbol::poly_heat(1, 2).unwrap()), "poly_heat(k=2)");
        assert_eq!(operator_label(&MultiplierSymbol::heat(1).unwrap()), "heat");
    }
}
