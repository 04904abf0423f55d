//! Cross-checks of the in-house dense routines against nalgebra.

use gaborprop::frames::{frame_bounds, FrameOperator, Lattice, Window};
use gaborprop::grid::SampledGrid;
use gaborprop::linalg::CMatrix;
use gaborprop::propagators::EvolutionOperator;
use gaborprop::Complex64 as C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn to_nalgebra(m: &CMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.dim(), m.dim(), |i, j| m[(i, j)])
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMatrix {
    let v: Vec<C64> = (0..n * n)
        .map(|_| C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
        .collect();
    CMatrix::from_fn(n, |i, j| v[i * n + j])
}

#[test]
fn matrix_exponential_matches_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=5 {
        for scale in [0.1, 1.0, 4.0] {
            let a = random_matrix(&mut rng, n, scale);
            let ours = a.expm().unwrap();
            let theirs = to_nalgebra(&a).exp();
            let norm = theirs.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for i in 0..n {
                for j in 0..n {
                    assert!((ours[(i, j)] - theirs[(i, j)]).norm() <= 1e-11 * norm.max(1.0));
                }
            }
        }
    }
}

#[test]
fn companion_roots_match_nalgebra_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let zeta = [C64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-2.0..2.0))];
        for op in [
            EvolutionOperator::wave(1).unwrap(),
            EvolutionOperator::klein_gordon(1, 1.5).unwrap(),
            EvolutionOperator::poly_heat(1, 2).unwrap(),
        ] {
            let mut ours = op.time_roots(&zeta).unwrap();
            let mut theirs: Vec<C64> = to_nalgebra(&op.companion(&zeta))
                .schur()
                .eigenvalues()
                .unwrap()
                .iter()
                .cloned()
                .collect();
            let key = |a: &C64, b: &C64| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
            ours.sort_by(key);
            theirs.sort_by(key);
            let scale = theirs.iter().map(|v| v.norm()).fold(1.0, f64::max);
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).norm() <= 1e-9 * scale, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn frame_bounds_match_dense_eigenvalues() {
    let grid = SampledGrid::new(1, 128, 16.0).unwrap();
    let g = Window::gaussian(1).unwrap().sample(&grid).unwrap();
    let lattice = Lattice::standard(1, 4).unwrap();
    let op = FrameOperator::new(&g, &lattice).unwrap();
    let n = grid.len();
    let mut dense = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[j] = C64::new(1.0, 0.0);
        for (i, v) in op.apply(&e).into_iter().enumerate() {
            dense[(i, j)] = v;
        }
    }
    let eig = dense.symmetric_eigenvalues();
    let lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bounds = frame_bounds(&g, &lattice).unwrap();
    assert!((bounds.lower - lo).abs() < 1e-8 * hi, "{} vs {lo}", bounds.lower);
    assert!((bounds.upper - hi).abs() < 1e-8 * hi, "{} vs {hi}", bounds.upper);
}
