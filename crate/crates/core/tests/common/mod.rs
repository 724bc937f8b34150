#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use qgraph::contour::rouche_threshold;
use qgraph::spectrum::spectrum_lower_bound;
use qgraph::{CMatrix, CouplingSpec, Edge, HermitianCoupling, MetricGraph, Potential};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded Hermitian `2d x 2d` matrix with entries uniform in `(-scale, scale)`.
pub fn random_hermitian(d: usize, seed: u64, scale: f64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = CMatrix::zeros(2 * d, 2 * d);
    for r in 0..2 * d {
        for c in r..2 * d {
            let z = if r == c {
                Complex64::new(rng.gen_range(-1.0..1.0), 0.0)
            } else {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            };
            a[(r, c)] = z * scale;
            a[(c, r)] = (z * scale).conj();
        }
    }
    a
}

pub fn diagonal(entries: &[f64]) -> CMatrix {
    let mut a = CMatrix::zeros(entries.len(), entries.len());
    for (i, &x) in entries.iter().enumerate() {
        a[(i, i)] = x.into();
    }
    a
}

pub fn poly(coeffs: &[f64]) -> Potential {
    Potential::Polynomial(coeffs.to_vec())
}

/// Interval `[0, pi]`, Neumann ends, `q = x^2`.
pub fn neumann_square() -> MetricGraph {
    MetricGraph::new(
        vec![Edge::new(PI, poly(&[0.0, 0.0, 1.0]))],
        CouplingSpec::Hermitian(diagonal(&[0.0, 0.0])),
    )
}

pub fn neumann_free(length: f64) -> MetricGraph {
    MetricGraph::new(
        vec![Edge::free(length)],
        CouplingSpec::Hermitian(diagonal(&[0.0, 0.0])),
    )
}

/// Interval of length 2 with Robin ends and a cubic potential.
pub fn robin_interval() -> MetricGraph {
    MetricGraph::new(
        vec![Edge::new(2.0, poly(&[0.4, -1.0, 0.5, 0.1]))],
        CouplingSpec::Hermitian(diagonal(&[0.7, -0.4])),
    )
}

/// `l = (1, sqrt 2)`, seeded random coupling, polynomial potentials.
pub fn generic_pair() -> MetricGraph {
    MetricGraph::new(
        vec![
            Edge::new(1.0, poly(&[1.0, -2.0, 3.0])),
            Edge::new(2f64.sqrt(), poly(&[0.5, 1.0])),
        ],
        CouplingSpec::Hermitian(random_hermitian(2, 7, 0.5)),
    )
}

/// `l = (1, sqrt 2, sqrt 3)`, seeded random coupling, mixed potentials.
pub fn generic_triple() -> MetricGraph {
    MetricGraph::new(
        vec![
            Edge::new(1.0, poly(&[0.5, 1.0])),
            Edge::new(2f64.sqrt(), Potential::Constant(-0.3)),
            Edge::new(3f64.sqrt(), poly(&[0.0, 0.0, 0.8])),
        ],
        CouplingSpec::Hermitian(random_hermitian(3, 11, 0.4)),
    )
}

/// Commensurate `l = (pi, pi / 2)`, seeded random coupling, polynomial potentials.
pub fn commensurate_pair() -> MetricGraph {
    MetricGraph::new(
        vec![
            Edge::new(PI, poly(&[0.3, 0.5])),
            Edge::new(PI / 2.0, poly(&[-0.2, 0.0, 1.0])),
        ],
        CouplingSpec::Hermitian(random_hermitian(2, 3, 0.5)),
    )
}

/// Interval `[0, pi]` with Robin ends and a cubic potential.
pub fn robin_pi() -> MetricGraph {
    MetricGraph::new(
        vec![Edge::new(PI, poly(&[0.4, -1.0, 0.5, 0.1]))],
        CouplingSpec::Hermitian(diagonal(&[0.7, -0.4])),
    )
}

/// Smallest level at which eigenvalue and zero counts are asserted.
pub fn count_floor(g: &MetricGraph, h: &HermitianCoupling) -> f64 {
    (-spectrum_lower_bound(g, h))
        .max(0.0)
        .sqrt()
        .max(rouche_threshold(g, h))
        .max(1.0)
}
