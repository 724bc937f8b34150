mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use qgraph::basis::{basis_numeric, wavenumber};
use qgraph::graph::coupling_hermitian;
use qgraph::secular::{BasisMode, SecularFunction, SPECTRUM_TOL};
use qgraph::spectrum::{allowed_level, find_eigenvalues, mu_sequence, partition};
use qgraph::trace::{predict_eigenvalue, trace_rhs};
use qgraph::{CMatrix, CouplingSpec, Edge, HermitianCoupling, MetricGraph, Potential};

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, 1..4)
}

fn pair_graph(seed: u64, scale: f64, q1: Vec<f64>, q2: Vec<f64>) -> MetricGraph {
    MetricGraph::new(
        vec![Edge::new(1.0, poly(&q1)), Edge::new(2f64.sqrt(), poly(&q2))],
        CouplingSpec::Hermitian(random_hermitian(2, seed, scale)),
    )
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wronskian_is_one(q in coeffs(), length in 0.3..3.0f64, re in -50.0..400.0f64, im in -20.0..20.0f64) {
        let lambda = Complex64::new(re, im);
        prop_assume!(wavenumber(lambda).im.abs() * length <= 4.0);
        let b = basis_numeric(&Edge::new(length, Potential::Polynomial(q)), lambda, SPECTRUM_TOL).unwrap();
        prop_assert!((b.wronskian() - 1.0).norm() <= 1e-9, "defect {}", (b.wronskian() - 1.0).norm());
    }

    #[test]
    fn couplings_are_hermitian(seed in any::<u64>(), d in 1usize..4, scale in 0.05..2.0f64) {
        let a = random_hermitian(d, seed, scale);
        let h = HermitianCoupling::new(a.clone()).unwrap();
        prop_assert_eq!(h.matrix(), &h.matrix().adjoint());

        // the Cayley transform U = (I + iH)(I - iH)^-1 is inverted exactly
        let i = Complex64::new(0.0, 1.0);
        let id = CMatrix::identity(2 * d, 2 * d);
        let u = (&id + &a * i) * (&id - &a * i).try_inverse().unwrap();
        let back = coupling_hermitian(&CouplingSpec::Unitary(u)).unwrap();
        prop_assert_eq!(back.matrix(), &back.matrix().adjoint());
        prop_assert!((back.matrix() - &a).norm() <= 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn phi_symmetries(seed in any::<u64>(), q1 in coeffs(), q2 in coeffs(), re in -20.0..200.0f64, im in -15.0..15.0f64) {
        let g = pair_graph(seed, 0.5, q1, q2);
        let h = g.hermitian().unwrap();
        let f = SecularFunction::new(&g, &h, BasisMode::Numeric, SPECTRUM_TOL);
        let lambda = Complex64::new(re, im);
        let value = f.eval(lambda).unwrap();
        prop_assert!(relative(f.eval(lambda.conj()).unwrap(), value.conj()) <= 1e-9);
        let k = wavenumber(lambda);
        prop_assert!(relative(f.eval_k(-k).unwrap(), f.eval_k(k).unwrap()) <= 1e-9);
    }

    #[test]
    fn rhs_of_table_matches_polynomial(a in -3.0..3.0f64, b in -3.0..3.0f64, length in 0.3..3.0f64, points in 2usize..12) {
        let xs: Vec<f64> = (0..points).map(|j| length * j as f64 / (points - 1) as f64).collect();
        let qs: Vec<f64> = xs.iter().map(|x| a + b * x).collect();
        let coupling = CouplingSpec::Hermitian(diagonal(&[0.0, 0.0]));
        let poly = MetricGraph::new(vec![Edge::new(length, Potential::Polynomial(vec![a, b]))], coupling.clone());
        let table = MetricGraph::new(vec![Edge::new(length, Potential::Table { xs, qs })], coupling);
        prop_assert!((trace_rhs(&poly) - trace_rhs(&table)).abs() <= 1e-12 * (1.0 + a.abs() + b.abs() * length));
    }

    #[test]
    fn constant_shift_moves_predictions_and_fixes_rhs(seed in any::<u64>(), q1 in coeffs(), q2 in coeffs(), c in -2.0..2.0f64, n in 1u64..40) {
        let g = pair_graph(seed, 0.5, q1.clone(), q2.clone());
        let shift = |q: &[f64]| {
            let mut q = q.to_vec();
            q[0] += c;
            q
        };
        let shifted = pair_graph(seed, 0.5, shift(&q1), shift(&q2));
        prop_assert!((trace_rhs(&g) - trace_rhs(&shifted)).abs() <= 1e-12 * (1.0 + trace_rhs(&g).abs()));
        let h = g.hermitian().unwrap();
        for edge in 0..2 {
            let p = predict_eigenvalue(&g, &h, edge, n).unwrap();
            let ps = predict_eigenvalue(&shifted, &h, edge, n).unwrap();
            prop_assert!((ps.value - p.value - c).abs() <= 1e-9 * p.value.abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn pairing_is_stable_under_level_extension(
        seed in any::<u64>(),
        q1 in prop::collection::vec(-1.0..1.0f64, 1..3),
        q2 in prop::collection::vec(-1.0..1.0f64, 1..3),
        extra in 0.0..5.0f64,
    ) {
        let g = pair_graph(seed, 0.3, q1, q2);
        let h = g.hermitian().unwrap();
        let low = count_floor(&g, &h) * 1.05 + extra;
        let short_level = allowed_level(&g, 0.0, low).unwrap();
        let long_level = allowed_level(&g, 0.0, low + 6.0).unwrap();
        let short = partition(&g, &find_eigenvalues(&g, &h, short_level, 1e-12).unwrap(), &mu_sequence(&g, short_level)).unwrap();
        let long = partition(&g, &find_eigenvalues(&g, &h, long_level, 1e-12).unwrap(), &mu_sequence(&g, long_level)).unwrap();
        prop_assert!(short.pairs.len() < long.pairs.len());
        for (a, b) in short.pairs.iter().zip(&long.pairs) {
            prop_assert_eq!((a.edge, a.n, a.mu), (b.edge, b.n, b.mu));
            prop_assert!((a.lambda - b.lambda).abs() <= 1e-9 * a.lambda.abs().max(1.0));
        }
    }
}
