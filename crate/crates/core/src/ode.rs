//! Fundamental matrix of `y'' = (q(x) - lambda) y` by a sixth-order Magnus
//! integrator with step-doubling error control.
//!
//! Each step evaluates `A(x) = [[0, 1], [q(x) - lambda, 0]]` at the three Gauss
//! points and forms the sixth-order Magnus exponent `Omega` (Blanes, Casas and
//! Ros). `Omega` is traceless, so its exponential is
//! `cosh(mu) I + sinh(mu)/mu Omega` with `mu^2 = -det(Omega)`. Each step therefore
//! has unit determinant, so the Wronskian is preserved to rounding, and the
//! scheme is exact for constant potentials.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat2 = [[Complex64; 2]; 2];

const IDENTITY: Mat2 = [
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
];

const GAUSS_OFFSET: f64 = 0.387_298_334_620_741_7; // sqrt(15)/10
const SQRT15_OVER_3: f64 = 1.290_994_448_735_805_6;
const MAX_STEPS: usize = 200_000;

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn commutator(a: &Mat2, b: &Mat2) -> Mat2 {
    let ab = mul(a, b);
    let ba = mul(b, a);
    [
        [ab[0][0] - ba[0][0], ab[0][1] - ba[0][1]],
        [ab[1][0] - ba[1][0], ab[1][1] - ba[1][1]],
    ]
}

fn lin(terms: &[(f64, &Mat2)]) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (w, m) in terms {
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += m[i][j] * *w;
            }
        }
    }
    out
}

/// `sinh(mu)/mu` and `cosh(mu)` as functions of `mu^2`, so the branch of `mu` never matters.
fn cosh_sinhc(mu2: Complex64) -> (Complex64, Complex64) {
    if mu2.norm() < 1e-6 {
        let ch = 1.0 + mu2 * (0.5 + mu2 / 24.0);
        let sc = 1.0 + mu2 * (1.0 / 6.0 + mu2 / 120.0);
        return (ch, sc);
    }
    let mu = mu2.sqrt();
    (mu.cosh(), mu.sinh() / mu)
}

fn magnus_step<Q: Fn(f64) -> f64>(q: &Q, lambda: Complex64, x: f64, h: f64) -> Mat2 {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let q1 = q(x + h * (0.5 - GAUSS_OFFSET));
    let q2 = q(x + 0.5 * h);
    let q3 = q(x + h * (0.5 + GAUSS_OFFSET));
    let a1 = [[zero, one * h], [(q2 - lambda) * h, zero]];
    let a2 = [
        [zero, zero],
        [Complex64::new(SQRT15_OVER_3 * h * (q3 - q1), 0.0), zero],
    ];
    let a3 = [
        [zero, zero],
        [
            Complex64::new(10.0 / 3.0 * h * (q3 - 2.0 * q2 + q1), 0.0),
            zero,
        ],
    ];
    let c1 = commutator(&a1, &a2);
    let c2 = lin(&[(
        -1.0 / 60.0,
        &commutator(&a1, &lin(&[(2.0, &a3), (1.0, &c1)])),
    )]);
    let left = lin(&[(-20.0, &a1), (-1.0, &a3), (1.0, &c1)]);
    let right = lin(&[(1.0, &a2), (1.0, &c2)]);
    let omega = lin(&[
        (1.0, &a1),
        (1.0 / 12.0, &a3),
        (1.0 / 240.0, &commutator(&left, &right)),
    ]);
    let mu2 = omega[0][0] * omega[0][0] + omega[0][1] * omega[1][0];
    let (ch, sc) = cosh_sinhc(mu2);
    [
        [ch + sc * omega[0][0], sc * omega[0][1]],
        [sc * omega[1][0], ch + sc * omega[1][1]],
    ]
}

/// Propagates the fundamental matrix `[[c, s], [c', s']]` from `x = 0` to `x = length`.
///
/// `breakpoints` are interior points where `q` may have a kink; steps never
/// straddle them. The local error, measured entrywise after scaling rows and
/// columns by `max(1, |sqrt(lambda)|)`, is kept below `tol` relative to the size
/// of the solution.
pub fn fundamental_matrix<Q: Fn(f64) -> f64>(
    q: &Q,
    breakpoints: &[f64],
    length: f64,
    lambda: Complex64,
    tol: f64,
) -> Result<Mat2> {
    Ok(fundamental_matrix_with_mesh(q, breakpoints, length, lambda, tol)?.0)
}

/// [`fundamental_matrix`] together with the accepted step boundaries, for reuse
/// by [`propagate_on_mesh`].
pub fn fundamental_matrix_with_mesh<Q: Fn(f64) -> f64>(
    q: &Q,
    breakpoints: &[f64],
    length: f64,
    lambda: Complex64,
    tol: f64,
) -> Result<(Mat2, Vec<f64>)> {
    let w = lambda.norm().sqrt().max(1.0);
    let scale = [[1.0, w], [1.0 / w, 1.0]];
    let mut knots = Vec::with_capacity(breakpoints.len() + 2);
    knots.push(0.0);
    knots.extend(
        breakpoints
            .iter()
            .copied()
            .filter(|&b| b > 0.0 && b < length),
    );
    knots.push(length);

    let mut y = IDENTITY;
    let mut mesh = vec![0.0];
    let mut h = length / 8.0;
    let mut steps = 0;
    for piece in knots.windows(2) {
        let (mut x, end) = (piece[0], piece[1]);
        let h_min = 1e-13 * length.max(1.0);
        while x < end {
            let last = h >= end - x;
            let step = if last { end - x } else { h };
            let full = mul(&magnus_step(q, lambda, x, step), &y);
            let half = step * 0.5;
            let first = magnus_step(q, lambda, x, half);
            let second = magnus_step(q, lambda, x + half, half);
            let fine = mul(&second, &mul(&first, &y));

            let mut err: f64 = 0.0;
            let mut size: f64 = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    err = err.max((fine[i][j] - full[i][j]).norm() * scale[i][j]);
                    size = size.max(fine[i][j].norm() * scale[i][j]);
                }
            }
            let err = err / 63.0 / size.max(1e-300);
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::ToleranceNotMet { tol, x });
            }
            if !err.is_finite() {
                return Err(Error::ToleranceNotMet { tol, x });
            }
            if err <= tol {
                y = fine;
                x = if last { end } else { x + step };
                mesh.push(x);
                let grow = if err == 0.0 {
                    4.0
                } else {
                    (0.9 * (tol / err).powf(1.0 / 7.0)).clamp(0.2, 4.0)
                };
                if !last {
                    h = step * grow;
                }
            } else {
                h = step * (0.9 * (tol / err).powf(1.0 / 7.0)).clamp(0.1, 0.9);
                if h < h_min {
                    return Err(Error::ToleranceNotMet { tol, x });
                }
            }
        }
    }
    Ok((y, mesh))
}

/// Propagates along a fixed mesh with the same two half-steps per interval that
/// the adaptive integrator accepts. Results are smooth in `lambda`, so
/// difference quotients in `lambda` are free of step-selection noise.
pub fn propagate_on_mesh<Q: Fn(f64) -> f64>(q: &Q, mesh: &[f64], lambda: Complex64) -> Mat2 {
    let mut y = IDENTITY;
    for w in mesh.windows(2) {
        let half = 0.5 * (w[1] - w[0]);
        let first = magnus_step(q, lambda, w[0], half);
        let second = magnus_step(q, lambda, w[0] + half, half);
        y = mul(&second, &mul(&first, &y));
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_equation_matches_trigonometric_solution() {
        let lambda = Complex64::new(7.3, 0.0);
        let l = 2.1;
        let y = fundamental_matrix(&|_| 0.0, &[], l, lambda, 1e-12).unwrap();
        let k = lambda.sqrt();
        assert!((y[0][0] - (k * l).cos()).norm() < 1e-13);
        assert!((y[0][1] - (k * l).sin() / k).norm() < 1e-13);
        assert!((y[1][0] + k * (k * l).sin()).norm() < 1e-12);
        assert!((y[1][1] - (k * l).cos()).norm() < 1e-13);
    }

    #[test]
    fn unit_determinant_for_varying_potential() {
        let lambda = Complex64::new(40.0, 15.0);
        let y = fundamental_matrix(&|x: f64| x * x - 3.0 * x, &[], 2.5, lambda, 1e-11).unwrap();
        let det = y[0][0] * y[1][1] - y[0][1] * y[1][0];
        assert!((det - 1.0).norm() < 1e-10, "det = {det}");
    }

    #[test]
    fn mesh_replay_reproduces_adaptive_result() {
        let q = |x: f64| x * x;
        let lambda = Complex64::new(90.0, 2.0);
        let (y, mesh) = fundamental_matrix_with_mesh(&q, &[], 2.0, lambda, 1e-10).unwrap();
        let replay = propagate_on_mesh(&q, &mesh, lambda);
        for i in 0..2 {
            for j in 0..2 {
                assert!((y[i][j] - replay[i][j]).norm() <= 1e-13 * (1.0 + y[i][j].norm()));
            }
        }
    }

    #[test]
    fn linear_potential_converges_under_refinement() {
        let lambda = Complex64::new(150.0, 0.0);
        let q = |x: f64| 4.0 * x;
        let coarse = fundamental_matrix(&q, &[], 1.0, lambda, 1e-8).unwrap();
        let fine = fundamental_matrix(&q, &[], 1.0, lambda, 1e-13).unwrap();
        assert!((coarse[0][0] - fine[0][0]).norm() < 1e-6);
        assert!((coarse[1][1] - fine[1][1]).norm() < 1e-6);
    }
}
