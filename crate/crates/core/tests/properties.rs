//! Property tests for the invariants each module promises.

use std::f64::consts::PI;

use gaborprop::fft::FftPlan;
use gaborprop::fit::{fit_model, upper_envelope, DecayModel};
use gaborprop::frames::{analysis, synthesis, CoefficientArray, Lattice, LatticeIndex, Window};
use gaborprop::gabor_matrix::{wave_bound, GaborMatrix};
use gaborprop::grid::SampledGrid;
use gaborprop::phase_space::PhaseSpacePoint;
use gaborprop::propagators::{decay_class, MultiplierSymbol, Polynomial};
use gaborprop::quasi::Halton;
use gaborprop::solver::{propagate_fourier, CauchyData};
use gaborprop::Complex64 as C64;
use proptest::prelude::*;

fn point(dim: usize) -> impl Strategy<Value = PhaseSpacePoint> {
    (
        prop::collection::vec(-5.0..5.0f64, dim),
        prop::collection::vec(-5.0..5.0f64, dim),
    )
        .prop_map(|(x, xi)| PhaseSpacePoint::new(&x, &xi).unwrap())
}

fn close(a: &PhaseSpacePoint, b: &PhaseSpacePoint, tol: f64) -> bool {
    a.sub(b).norm() <= tol
}

proptest! {
    #[test]
    fn rotation_squares_to_minus_identity(z in point(2)) {
        prop_assert!(close(&z.rotate().rotate(), &z.neg(), 1e-15));
    }

    #[test]
    fn rotation_is_an_isometry(z in point(3), w in point(3)) {
        let d = w.sub(&z);
        prop_assert!((d.rotate().norm() - d.norm()).abs() < 1e-12);
    }

    #[test]
    fn wave_bound_is_at_most_t_and_symmetric(t in 0.0..2.0f64, z in point(2), w in point(2)) {
        let b = wave_bound(t, &z, &w).unwrap();
        prop_assert!(b <= t + 1e-15 && b >= 0.0);
        prop_assert!((b - wave_bound(t, &w, &z).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn lattice_indices_roundtrip(dim in 1usize..4, r in 1usize..4, seed in any::<u64>()) {
        let lattice = Lattice::standard(dim, r).unwrap();
        let flat = (seed % lattice.len() as u64) as usize;
        let idx = lattice.index(flat);
        prop_assert_eq!(lattice.flat_index(&idx), Some(flat));
        prop_assert!(idx.max_norm(dim) <= r as i64);
    }

    #[test]
    fn fft_roundtrip(values in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 64)) {
        let plan = FftPlan::new(64).unwrap();
        let original: Vec<C64> = values.iter().map(|&(a, b)| C64::new(a, b)).collect();
        let mut data = original.clone();
        plan.forward(&mut data);
        plan.inverse(&mut data);
        for (a, b) in data.iter().zip(&original) {
            prop_assert!((a / 64.0 - b).norm() < 1e-13);
        }
    }

    #[test]
    fn halton_points_stay_in_the_unit_cube(offset in 0u64..10_000, dim in 1usize..8) {
        let mut h = Halton::new(dim, offset);
        for p in h.take_points(32) {
            prop_assert!(p.iter().all(|v| (0.0..1.0).contains(v)));
        }
    }

    #[test]
    fn fit_recovers_exact_models(c in 0.1..10.0f64, eps in 0.05..2.0f64, p in 0.5..2.5f64) {
        let rho: Vec<f64> = (1..60).map(|k| k as f64 * 0.1).collect();
        let vals: Vec<f64> = rho.iter().map(|r| c * (-eps * r.powf(p)).exp()).collect();
        let fit = fit_model(&rho, &vals, DecayModel::RadialExp { p }, 0.0).unwrap();
        prop_assert!((fit.c - c).abs() < 1e-8 * c);
        prop_assert!((fit.epsilon - eps).abs() < 1e-8);
        prop_assert!(fit.r2 > 1.0 - 1e-12 && fit.r2 <= 1.0);
    }

    #[test]
    fn upper_envelope_is_nonincreasing(points in prop::collection::vec((0.0..10.0f64, 0.0..1.0f64), 1..80)) {
        let env = upper_envelope(&points);
        for w in env.windows(2) {
            prop_assert!(w[0].0 < w[1].0 && w[0].1 >= w[1].1);
        }
        for &(r, v) in &points {
            // every point lies under the envelope at some radius >= its own
            prop_assert!(env.iter().any(|&(er, ev)| er >= r - 1e-9 * r.max(1.0) && ev >= v));
        }
    }

    #[test]
    fn decay_class_ranges(nu in 1.0..20.0f64) {
        let c = decay_class(nu).unwrap();
        prop_assert!((1.0..=2.0).contains(&c.r));
        prop_assert!((0.0..1.0).contains(&c.s));
        prop_assert!((c.s - (1.0 - 1.0 / nu)).abs() < 1e-15);
    }

    #[test]
    fn polynomial_products_evaluate_pointwise(a in -2.0..2.0f64, b in -2.0..2.0f64, x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let mut p = Polynomial::neg_laplacian(2);
        p.push(&[1, 0], C64::new(a, b)).unwrap();
        let q = Polynomial::constant(2, C64::new(b, -a)).add(&Polynomial::neg_laplacian(2).pow(2));
        let xi = [x, y];
        let lhs = p.mul(&q).eval_real(&xi);
        let rhs = p.eval_real(&xi) * q.eval_real(&xi);
        prop_assert!((lhs - rhs).norm() <= 1e-9 * rhs.norm().max(1.0));
    }

    #[test]
    fn heat_symbol_is_a_contraction(t in 0.0..3.0f64, xi in prop::collection::vec(-4.0..4.0f64, 2)) {
        let v = MultiplierSymbol::heat(2).unwrap().eval(t, &xi).unwrap().value;
        prop_assert!(v.norm() <= 1.0 + 1e-15 && v.im == 0.0);
    }

    #[test]
    fn generic_symbols_agree_with_closed_forms(t in 0.0..1.5f64, xi in -3.0..3.0f64, mass in 0.0..2.0f64) {
        for s in [
            MultiplierSymbol::wave(1).unwrap(),
            MultiplierSymbol::klein_gordon(1, mass).unwrap(),
            MultiplierSymbol::heat(1).unwrap(),
        ] {
            let a = s.eval(t, &[xi]).unwrap().value;
            let b = s.as_generic().eval(t, &[xi]).unwrap().value;
            prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0));
        }
    }

    #[test]
    fn time_derivative_matches_finite_difference(t in 0.05..1.0f64, xi in -2.0..2.0f64) {
        let s = MultiplierSymbol::klein_gordon(1, 1.0).unwrap();
        let h = 1e-5;
        let d = s.time_derivatives(t, &[xi], 1).unwrap();
        let fd = (s.eval(t + h, &[xi]).unwrap().value - s.eval(t - h, &[xi]).unwrap().value) / (2.0 * h);
        prop_assert!((d[1] - fd).norm() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn analysis_and_synthesis_are_adjoint(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let grid = SampledGrid::new(1, 128, 16.0).unwrap();
        let lattice = Lattice::standard(1, 3).unwrap();
        let g = Window::gaussian(1).unwrap().sample(&grid).unwrap();
        let f = grid.sample(|x| C64::new((-(x[0] - 0.3).powi(2)).exp(), 0.5 * (-(x[0] + 1.0).powi(2)).exp()));
        let values: Vec<C64> = (0..lattice.len()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let c = CoefficientArray::from_values(&lattice, values).unwrap();
        let lhs = synthesis(&c, &g).unwrap().inner(&f);
        let a = analysis(&f, &g, &lattice).unwrap();
        let rhs: C64 = c.iter().map(|(idx, v)| v * a.get(&idx).conj()).sum();
        prop_assert!((lhs - rhs).norm() < 1e-10 * lhs.norm().max(1.0));
    }

    #[test]
    fn thresholding_keeps_large_entries_and_controls_the_norm(theta in 1e-6..1e-1f64, rate in 0.2..3.0f64) {
        let lattice = Lattice::standard(1, 3).unwrap();
        let dense = GaborMatrix::from_kernel_fn(&lattice, "synthetic", |dm, n, np| {
            let r2 = (dm[0] * dm[0]) as f64 + 0.25 * ((np[0] - n[0]) * (np[0] - n[0])) as f64;
            C64::from_polar((-rate * r2).exp(), 0.3 * dm[0] as f64)
        });
        let sparse = dense.thresholded(theta);
        prop_assert!(sparse.triplets().all(|(_, _, v)| v.norm() >= theta));
        prop_assert!(sparse.nnz() <= dense.nnz());
        prop_assert!(dense.thresholded(theta * 10.0).nnz() <= sparse.nnz());
        let diff = GaborMatrix::from_kernel_fn(&lattice, "diff", |dm, n, np| dense.kernel(dm, n, np) - sparse.kernel(dm, n, np));
        prop_assert!(diff.max_column_sum() <= theta * lattice.len() as f64);
    }

    #[test]
    fn space_shifts_preserve_entry_moduli(a in -2i64..=2, m in -1i64..=1, n in -2i64..=2, mp in -1i64..=1, np in -2i64..=2) {
        let lattice = Lattice::standard(1, 3).unwrap();
        let window = Window::gaussian(1).unwrap();
        let options = gaborprop::gabor_matrix::AssemblyOptions::default();
        let m_ = gaborprop::gabor_matrix::assemble(&MultiplierSymbol::wave(1).unwrap(), 0.4, &window, &lattice, &options).unwrap();
        let e = |mm: i64, nn: i64, mmp: i64, nnp: i64| {
            m_.entry(&LatticeIndex::new(&[mmp], &[nnp]), &LatticeIndex::new(&[mm], &[nn])).norm()
        };
        prop_assert!((e(m, n, mp, np) - e(m + a, n, mp + a, np)).abs() < 1e-8);
    }

    #[test]
    fn fourier_propagation_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64, shift in -1.0..1.0f64, t in 0.0..1.0f64) {
        let grid = SampledGrid::new(1, 256, 16.0).unwrap();
        let u = grid.sample(|x| C64::new((-PI * (x[0] - shift).powi(2)).exp(), 0.0));
        let v = grid.sample(|x| C64::new(0.0, x[0] * (-PI * x[0] * x[0]).exp()));
        let sym = MultiplierSymbol::wave(1).unwrap();
        let du = CauchyData::new(sym.clone(), vec![u.clone(), v.clone()]).unwrap();
        let dv = CauchyData::new(sym, vec![v, u]).unwrap();
        let (ca, cb) = (C64::new(a, 0.0), C64::new(b, 0.0));
        let lhs = propagate_fourier(&du.combine(ca, &dv, cb).unwrap(), t).unwrap();
        let rhs = propagate_fourier(&du, t).unwrap().scale(ca).add(&propagate_fourier(&dv, t).unwrap().scale(cb));
        prop_assert!(lhs.sub(&rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
    }
}
