//! Fundamental solutions `c`, `s` of `-y'' + q y = lambda y` on one edge,
//! evaluated at the far endpoint `x = l`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{potential_moments, Edge};
use crate::ode::{fundamental_matrix_with_mesh, propagate_on_mesh, Mat2};

/// Values `c(l)`, `c'(l)`, `s(l)`, `s'(l)` for spectral parameter `lambda = k^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisValues {
    pub c: Complex64,
    pub cprime: Complex64,
    pub s: Complex64,
    pub sprime: Complex64,
    pub k: Complex64,
    pub lambda: Complex64,
}

impl BasisValues {
    pub fn wronskian(&self) -> Complex64 {
        self.c * self.sprime - self.cprime * self.s
    }
}

/// Principal square root, `Re k >= 0`; negative reals map to the positive imaginary axis.
pub fn wavenumber(lambda: Complex64) -> Complex64 {
    if lambda.im == 0.0 && lambda.re < 0.0 {
        Complex64::new(0.0, (-lambda.re).sqrt())
    } else {
        lambda.sqrt()
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 1e-14 && tol < 1e-3 {
        Ok(())
    } else {
        Err(Error::BadTolerance(tol))
    }
}

/// Integrates the edge equation in `lambda` with local error below `tol`.
pub fn basis_numeric(edge: &Edge, lambda: Complex64, tol: f64) -> Result<BasisValues> {
    Ok(basis_numeric_with_mesh(edge, lambda, tol)?.0)
}

/// [`basis_numeric`] plus the integrator's step mesh, see [`basis_on_mesh`].
pub fn basis_numeric_with_mesh(
    edge: &Edge,
    lambda: Complex64,
    tol: f64,
) -> Result<(BasisValues, Vec<f64>)> {
    check_tol(tol)?;
    let p = &edge.potential;
    let breaks = p.breakpoints(edge.length);
    let (y, mesh) =
        fundamental_matrix_with_mesh(&|x| p.eval(x), &breaks, edge.length, lambda, tol)?;
    Ok((from_matrix(&y, lambda), mesh))
}

/// Values at `lambda` on a mesh chosen for a nearby spectral parameter.
pub fn basis_on_mesh(edge: &Edge, mesh: &[f64], lambda: Complex64) -> BasisValues {
    let p = &edge.potential;
    from_matrix(&propagate_on_mesh(&|x| p.eval(x), mesh, lambda), lambda)
}

fn from_matrix(y: &Mat2, lambda: Complex64) -> BasisValues {
    BasisValues {
        c: y[0][0],
        s: y[0][1],
        cprime: y[1][0],
        sprime: y[1][1],
        k: wavenumber(lambda),
        lambda,
    }
}

/// Exact values for a constant potential `q = shift`, with `kappa^2 = lambda - shift`.
///
/// Everything is expressed through `kappa^2`, so `lambda = shift` and
/// `lambda < shift` need no special treatment.
pub fn basis_constant(length: f64, shift: f64, lambda: Complex64) -> BasisValues {
    let z = lambda - shift;
    let kappa = z.sqrt();
    let arg = kappa * length;
    let cos = arg.cos();
    // sin(kappa l)/kappa, even in kappa
    let sinc = if arg.norm() < 1e-4 {
        let a2 = arg * arg;
        length * (1.0 - a2 / 6.0 + a2 * a2 / 120.0)
    } else {
        arg.sin() / kappa
    };
    BasisValues {
        c: cos,
        cprime: -z * sinc,
        s: sinc,
        sprime: cos,
        k: wavenumber(lambda),
        lambda,
    }
}

/// Leading terms of the large-`k` expansion at `x = l`; the omitted remainders
/// are `o(e^{|Im k| l} / k^2)` for `c`, `s'`, `o(e^{|Im k| l} / k)` for `c'` and
/// `o(e^{|Im k| l} / k^3)` for `s`.
pub fn basis_asymptotic(edge: &Edge, k: Complex64) -> Result<BasisValues> {
    if k == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroWavenumber);
    }
    let m = potential_moments(edge);
    let integral = m.integral();
    let half = 0.5 * integral;
    let sq8 = integral * integral / 8.0;
    let qminus = 0.25 * (m.ql - m.q0);
    let qplus = 0.25 * (m.ql + m.q0);

    let arg = k * edge.length;
    let (sin, cos) = (arg.sin(), arg.cos());
    let k2 = k * k;
    Ok(BasisValues {
        c: cos + sin / k * half + cos / k2 * (qminus - sq8),
        cprime: -k * sin + cos * half + sin / k * (qplus + sq8),
        s: sin / k - cos / k2 * half + sin / (k2 * k) * (qplus - sq8),
        sprime: cos + sin / k * half - cos / k2 * (qminus + sq8),
        k,
        lambda: k2,
    })
}

pub fn wronskian_defect(b: &BasisValues) -> f64 {
    (b.wronskian() - 1.0).norm()
}
