//! Cross-module checks: matrices against grid computations, and the Gabor
//! solver against the Fourier solution for every named family and data type.

use std::f64::consts::PI;

use gaborprop::frames::{shift_sampled, Lattice, Window};
use gaborprop::gabor_matrix::{assemble, AssemblyOptions};
use gaborprop::grid::{SampledFunction, SampledGrid};
use gaborprop::propagators::MultiplierSymbol;
use gaborprop::solver::{CauchyData, GaborPropagator, GaborSetup};
use gaborprop::Complex64;

/// `sigma(t, D) f` on the grid by FFT.
fn apply_on_grid(symbol: &MultiplierSymbol, t: f64, f: &SampledFunction) -> SampledFunction {
    let grid = f.grid();
    let mut spectrum = grid.forward(f.values());
    for (k, v) in spectrum.iter_mut().enumerate() {
        *v *= symbol.eval(t, &grid.frequency_point(k)[..grid.dim()]).unwrap().value;
    }
    grid.from_values(grid.inverse(&spectrum)).unwrap()
}

#[test]
fn assembled_entries_match_grid_inner_products() {
    let grid = SampledGrid::new(1, 256, 16.0).unwrap();
    let lattice = Lattice::standard(1, 3).unwrap();
    let window = Window::gaussian(1).unwrap();
    let g = window.sample(&grid).unwrap();
    for (symbol, t) in [
        (MultiplierSymbol::heat(1).unwrap(), 0.0),
        (MultiplierSymbol::heat(1).unwrap(), 0.3),
        (MultiplierSymbol::wave(1).unwrap(), 0.5),
        (MultiplierSymbol::klein_gordon(1, 1.0).unwrap(), 0.25),
    ] {
        let m = assemble(&symbol, t, &window, &lattice, &AssemblyOptions::default()).unwrap();
        let atoms: Vec<_> = lattice.indices().map(|idx| shift_sampled(&g, &lattice, &idx).unwrap()).collect();
        let images: Vec<_> = atoms.iter().map(|a| apply_on_grid(&symbol, t, a)).collect();
        let mut worst: f64 = 0.0;
        for (j, col) in lattice.indices().enumerate() {
            for (i, row) in lattice.indices().enumerate() {
                let oracle = images[j].inner(&atoms[i]);
                worst = worst.max((m.entry(&row, &col) - oracle).norm());
            }
        }
        assert!(worst < 1e-9, "{} t={t}: {worst:e}", symbol.name());
    }
}

fn data(kind: &str, order: usize, grid: &SampledGrid) -> Vec<SampledFunction> {
    (0..order)
        .map(|k| match kind {
            "gaussian" => grid.sample(|x| Complex64::new(x[0].powi(k as i32) * (-PI * x[0] * x[0]).exp(), 0.0)),
            _ => Window::hermite(&[k as u32 + 1]).unwrap().sample(grid).unwrap(),
        })
        .collect()
}

fn check_family(symbol: MultiplierSymbol, grid: &SampledGrid, radius: usize) {
    let setup = GaborSetup::new(&Window::gaussian(1).unwrap(), &Lattice::standard(1, radius).unwrap(), grid).unwrap();
    for kind in ["gaussian", "hermite"] {
        let cauchy = CauchyData::new(symbol.clone(), data(kind, symbol.order(), grid)).unwrap();
        for t in [0.1, 0.5] {
            let report = GaborPropagator::new(&cauchy, t, &setup).unwrap().solve(0.0).unwrap();
            let error = report.relative_error.unwrap();
            assert!(error <= 1e-6, "{} {kind} t={t}: {error:e}", symbol.name());
        }
    }
}

#[test]
fn oracle_equivalence_for_second_order_and_heat() {
    let grid = SampledGrid::new(1, 1024, 32.0).unwrap();
    check_family(MultiplierSymbol::heat(1).unwrap(), &grid, 6);
    check_family(MultiplierSymbol::wave(1).unwrap(), &grid, 6);
    check_family(MultiplierSymbol::klein_gordon(1, 1.0).unwrap(), &grid, 6);
}

#[test]
fn oracle_equivalence_for_poly_heat() {
    // stretched-exponential tails need a wider box and grid
    let grid = SampledGrid::new(1, 2048, 64.0).unwrap();
    check_family(MultiplierSymbol::poly_heat(1, 2).unwrap(), &grid, 20);
}
