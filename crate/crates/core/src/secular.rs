//! Secular function `phi = det(H M1 + M2)`, its zero-potential counterpart and
//! the large-`k` expansions of `phi` and of its normalized logarithms.

use num_complex::Complex64;

use crate::basis::{
    basis_constant, basis_numeric, basis_numeric_with_mesh, basis_on_mesh, wavenumber, BasisValues,
};
use crate::error::{Error, Result};
use crate::graph::{
    block_entries, potential_moments, BlockEntries, CMatrix, HermitianCoupling, MetricGraph,
    PotentialMoments,
};

/// Default local tolerance of the edge integrator for spectral work.
pub const SPECTRUM_TOL: f64 = 1e-12;
/// Default local tolerance of the edge integrator along contours.
pub const CONTOUR_TOL: f64 = 1e-10;
/// Local tolerance of the edge integrator when only zero counts and starting values are needed.
pub const COUNT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisMode {
    /// Integrate the edge equations with the actual potentials.
    Numeric,
    /// Closed forms with every potential replaced by zero (gives `phi_0`).
    ZeroPotential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecularVariant {
    Determinant,
    DeterminantQ0,
    Expanded,
    LogRatioProduct,
    LogRatioPhi0,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularValue {
    pub value: Complex64,
    pub k: Complex64,
    pub variant: SecularVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogRatioVariant {
    VsProduct,
    VsPhi0,
}

/// `M1`, `M2` in the global endpoint ordering; rows `2j`, `2j + 1` belong to edge `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrices {
    pub m1: CMatrix,
    pub m2: CMatrix,
    pub k: Complex64,
}

fn edge_basis(
    g: &MetricGraph,
    j: usize,
    lambda: Complex64,
    mode: BasisMode,
    tol: f64,
) -> Result<BasisValues> {
    let edge = &g.edges[j];
    match mode {
        BasisMode::ZeroPotential => Ok(basis_constant(edge.length, 0.0, lambda)),
        BasisMode::Numeric => basis_numeric(edge, lambda, tol),
    }
}

pub fn transfer_matrices(
    g: &MetricGraph,
    lambda: Complex64,
    mode: BasisMode,
) -> Result<TransferMatrices> {
    transfer_matrices_tol(g, lambda, mode, SPECTRUM_TOL)
}

pub fn transfer_matrices_tol(
    g: &MetricGraph,
    lambda: Complex64,
    mode: BasisMode,
    tol: f64,
) -> Result<TransferMatrices> {
    Ok(assemble(&edge_bases(g, lambda, mode, tol)?, lambda))
}

fn edge_bases(
    g: &MetricGraph,
    lambda: Complex64,
    mode: BasisMode,
    tol: f64,
) -> Result<Vec<BasisValues>> {
    (0..g.edge_count())
        .map(|j| edge_basis(g, j, lambda, mode, tol))
        .collect()
}

fn assemble(bases: &[BasisValues], lambda: Complex64) -> TransferMatrices {
    let n = 2 * bases.len();
    let mut m1 = CMatrix::zeros(n, n);
    let mut m2 = CMatrix::zeros(n, n);
    for (j, b) in bases.iter().enumerate() {
        let (r0, r1) = (2 * j, 2 * j + 1);
        m1[(r0, r0)] = 1.0.into();
        m1[(r1, r0)] = b.c;
        m1[(r1, r1)] = b.s;
        m2[(r0, r1)] = 1.0.into();
        m2[(r1, r0)] = -b.cprime;
        m2[(r1, r1)] = -b.sprime;
    }
    TransferMatrices {
        m1,
        m2,
        k: wavenumber(lambda),
    }
}

/// Reusable evaluator of `phi(lambda)` for one graph, coupling and mode.
#[derive(Debug, Clone)]
pub struct SecularFunction<'a> {
    graph: &'a MetricGraph,
    h: &'a HermitianCoupling,
    mode: BasisMode,
    tol: f64,
    /// Fixed integrator meshes, one per edge; see [`SecularFunction::frozen_at`].
    meshes: Option<Vec<Vec<f64>>>,
}

impl<'a> SecularFunction<'a> {
    pub fn new(
        graph: &'a MetricGraph,
        h: &'a HermitianCoupling,
        mode: BasisMode,
        tol: f64,
    ) -> Self {
        Self {
            graph,
            h,
            mode,
            tol,
            meshes: None,
        }
    }

    /// Copy that integrates every edge on one fixed mesh: the union of the
    /// adaptive meshes chosen at `references`.
    ///
    /// On a fixed mesh `phi` is an entire function of `lambda` with no
    /// step-selection noise, which contour quadratures need in order to
    /// converge. The mesh is accurate near the references; pick them where the
    /// integrand is hardest (largest `|lambda|`, largest `|Im k|`).
    pub fn frozen_at(&self, references: &[Complex64]) -> Result<Self> {
        if self.mode == BasisMode::ZeroPotential {
            return Ok(self.clone());
        }
        let mut meshes = Vec::with_capacity(self.graph.edge_count());
        for edge in &self.graph.edges {
            let mut mesh: Vec<f64> = Vec::new();
            for &r in references {
                mesh.extend(basis_numeric_with_mesh(edge, r, self.tol)?.1);
            }
            mesh.sort_by(f64::total_cmp);
            mesh.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * edge.length.max(1.0));
            meshes.push(mesh);
        }
        Ok(Self {
            meshes: Some(meshes),
            ..self.clone()
        })
    }

    pub fn graph(&self) -> &MetricGraph {
        self.graph
    }

    pub fn coupling(&self) -> &HermitianCoupling {
        self.h
    }

    pub fn mode(&self) -> BasisMode {
        self.mode
    }

    pub fn with_mode(&self, mode: BasisMode) -> Self {
        Self {
            mode,
            ..self.clone()
        }
    }

    /// `phi` as a function of the spectral parameter.
    pub fn eval(&self, lambda: Complex64) -> Result<Complex64> {
        if let (BasisMode::Numeric, Some(meshes)) = (self.mode, &self.meshes) {
            let bases: Vec<BasisValues> = self
                .graph
                .edges
                .iter()
                .zip(meshes)
                .map(|(e, m)| basis_on_mesh(e, m, lambda))
                .collect();
            return Ok(self.det_of(&bases, lambda));
        }
        let bases = edge_bases(self.graph, lambda, self.mode, self.tol)?;
        Ok(secular_determinant(self.h.matrix(), &bases))
    }

    pub fn eval_k(&self, k: Complex64) -> Result<Complex64> {
        self.eval(k * k)
    }

    fn det_of(&self, bases: &[BasisValues], _lambda: Complex64) -> Complex64 {
        secular_determinant(self.h.matrix(), bases)
    }

    /// `phi(lambda)` and `phi(lambda + offset)` for each offset. With numeric
    /// bases the offsets reuse the integrator mesh chosen at `lambda`, so
    /// differences between the values are smooth in the offsets.
    pub fn eval_stencil(
        &self,
        lambda: Complex64,
        offsets: &[Complex64],
    ) -> Result<(Complex64, Vec<Complex64>)> {
        let d = self.graph.edge_count();
        match self.mode {
            _ if self.meshes.is_some() || self.mode == BasisMode::ZeroPotential => {
                let value = self.eval(lambda)?;
                let others = offsets
                    .iter()
                    .map(|o| self.eval(lambda + o))
                    .collect::<Result<Vec<_>>>()?;
                Ok((value, others))
            }
            _ => {
                let mut centre = Vec::with_capacity(d);
                let mut meshes = Vec::with_capacity(d);
                for edge in &self.graph.edges {
                    let (b, mesh) = basis_numeric_with_mesh(edge, lambda, self.tol)?;
                    centre.push(b);
                    meshes.push(mesh);
                }
                let value = self.det_of(&centre, lambda);
                let others = offsets
                    .iter()
                    .map(|o| {
                        let at = lambda + o;
                        let bases: Vec<BasisValues> = self
                            .graph
                            .edges
                            .iter()
                            .zip(&meshes)
                            .map(|(e, m)| basis_on_mesh(e, m, at))
                            .collect();
                        self.det_of(&bases, at)
                    })
                    .collect();
                Ok((value, others))
            }
        }
    }

    /// `phi` and `d phi / d lambda` from a four-point complex difference stencil
    /// (error `O(step^4)`).
    pub fn eval_with_derivative(&self, lambda: Complex64) -> Result<(Complex64, Complex64)> {
        let step = self.derivative_step(lambda);
        let dirs = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        let offsets: Vec<Complex64> = dirs.iter().map(|d| d * step).collect();
        let (value, others) = self.eval_stencil(lambda, &offsets)?;
        let acc: Complex64 = others.iter().zip(&dirs).map(|(v, d)| v / d).sum();
        Ok((value, acc / (4.0 * step)))
    }

    /// `phi` and `d phi / d lambda` from a central difference (error `O(step^2)`);
    /// adequate where only zero counts are needed.
    pub fn eval_with_central_derivative(
        &self,
        lambda: Complex64,
    ) -> Result<(Complex64, Complex64)> {
        let step = self.derivative_step(lambda);
        let offsets = [Complex64::new(step, 0.0), Complex64::new(-step, 0.0)];
        let (value, others) = self.eval_stencil(lambda, &offsets)?;
        Ok((value, (others[0] - others[1]) / (2.0 * step)))
    }

    /// `phi'(k) / phi(k)` with `phi` regarded as a function of `k`.
    pub fn log_derivative_k(&self, k: Complex64) -> Result<(Complex64, Complex64)> {
        let (value, dl) = self.eval_with_derivative(k * k)?;
        Ok((value, 2.0 * k * dl / value))
    }

    fn derivative_step(&self, lambda: Complex64) -> f64 {
        let total: f64 = self.graph.edges.iter().map(|e| e.length).sum();
        // zeros in lambda are spaced roughly 2|k| pi / total apart
        1e-3 * (1.0 + lambda.norm().sqrt()) / total.max(1.0)
    }
}

/// Above this `|c s'|` an edge is written in boundary-value coordinates.
const CANCELLATION_LIMIT: f64 = 4.0;

/// `det(H M1 + M2)`.
///
/// Away from the real axis `c s' - c' s = 1` is the difference of two products
/// of size `e^{2 |Im k| l}`, and expanding the determinant in the `(c, s)`
/// coefficients loses those digits. For such edges the unknowns are changed to
/// `y(0), y(l)`: the column pair is multiplied by `M1_j^{-1}`, which turns the
/// derivative rows into the Dirichlet-to-Neumann map
/// `[[-c/s, 1/s], [1/s, -s'/s]]` with the Wronskian set to one, and the
/// determinant picks up a factor `s_j`.
pub(crate) fn secular_determinant(h: &CMatrix, bases: &[BasisValues]) -> Complex64 {
    let n = 2 * bases.len();
    let mut m = h.clone();
    let mut scale = Complex64::new(1.0, 0.0);
    for (j, b) in bases.iter().enumerate() {
        let (r0, r1) = (2 * j, 2 * j + 1);
        if (b.c * b.sprime).norm() > CANCELLATION_LIMIT {
            let inv = 1.0 / b.s;
            m[(r0, r0)] -= b.c * inv;
            m[(r0, r1)] += inv;
            m[(r1, r0)] += inv;
            m[(r1, r1)] -= b.sprime * inv;
            scale *= b.s;
        } else {
            for r in 0..n {
                let (h0, h1) = (m[(r, r0)], m[(r, r1)]);
                m[(r, r0)] = h0 + h1 * b.c;
                m[(r, r1)] = h1 * b.s;
            }
            m[(r0, r1)] += 1.0;
            m[(r1, r0)] -= b.cprime;
            m[(r1, r1)] -= b.sprime;
        }
    }
    scale * determinant(m)
}

pub(crate) fn determinant(m: CMatrix) -> Complex64 {
    if m.nrows() == 2 {
        return m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    }
    m.lu().determinant()
}

pub fn phi(
    g: &MetricGraph,
    h: &HermitianCoupling,
    lambda: Complex64,
    mode: BasisMode,
) -> Result<SecularValue> {
    let value = SecularFunction::new(g, h, mode, SPECTRUM_TOL).eval(lambda)?;
    Ok(SecularValue {
        value,
        k: wavenumber(lambda),
        variant: match mode {
            BasisMode::Numeric => SecularVariant::Determinant,
            BasisMode::ZeroPotential => SecularVariant::DeterminantQ0,
        },
    })
}

/// Per-edge trigonometric data at a fixed `k`.
struct Trig {
    sin: Vec<Complex64>,
    cos: Vec<Complex64>,
}

impl Trig {
    fn new(lengths: &[f64], k: Complex64) -> Self {
        let args: Vec<_> = lengths.iter().map(|&l| k * l).collect();
        Self {
            sin: args.iter().map(|a| a.sin()).collect(),
            cos: args.iter().map(|a| a.cos()).collect(),
        }
    }
}

struct ExpansionData {
    moments: Vec<PotentialMoments>,
    blocks: BlockEntries,
    lengths: Vec<f64>,
}

impl ExpansionData {
    fn new(g: &MetricGraph, h: &HermitianCoupling) -> Self {
        Self {
            moments: g.edges.iter().map(potential_moments).collect(),
            blocks: block_entries(h),
            lengths: g.lengths(),
        }
    }
}

/// The expanded secular function: leading product, single-edge and pair corrections,
/// with the `o(k^{d-2} e^{|Im k| sum l})` remainder dropped.
pub fn phi_expanded(g: &MetricGraph, h: &HermitianCoupling, k: Complex64) -> Result<SecularValue> {
    if k == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroWavenumber);
    }
    let data = ExpansionData::new(g, h);
    let d = g.edge_count();
    let t = Trig::new(&data.lengths, k);
    let p: Vec<Complex64> = t.sin.iter().map(|s| -k * s).collect();
    let product_except = |skip: &[usize]| -> Complex64 {
        p.iter()
            .enumerate()
            .filter(|(o, _)| !skip.contains(o))
            .map(|(_, v)| *v)
            .product()
    };

    let mut value = product_except(&[]);
    for i in 0..d {
        let (a, blk) = (data.moments[i].a, data.blocks.edges[i]);
        value += product_except(&[i]) * (t.cos[i] * (a - blk.trace()) - 2.0 * blk.h12.re);
    }
    for i in 0..d {
        for j in i + 1..d {
            let (mi, mj) = (data.moments[i], data.moments[j]);
            let (bi, bj) = (data.blocks.edges[i], data.blocks.edges[j]);
            let (ti, tj) = (bi.trace(), bj.trace());
            let (ri, rj) = (bi.h12.re, bj.h12.re);
            let x = data.blocks.cross(i, j);
            let group = t.sin[i] * t.sin[j] / (d - 1) as f64
                * (mi.a * ti + mj.a * tj - mi.b - mj.b - bi.det() - bj.det())
                + t.cos[i]
                    * t.cos[j]
                    * (mi.a * mj.a - mi.a * tj - mj.a * ti - x.norm_sqr_sum() + ti * tj)
                + t.cos[i] * (2.0 * (ti - mi.a) * rj - x.mix_start())
                + t.cos[j] * (2.0 * (tj - mj.a) * ri - x.mix_end())
                + 4.0 * ri * rj
                - x.mix_both();
            value += product_except(&[i, j]) * group;
        }
    }
    Ok(SecularValue {
        value,
        k,
        variant: SecularVariant::Expanded,
    })
}

/// Default forbidden-region margin `epsilon`: 0.9 times [`epsilon_bound`].
pub fn default_epsilon(lengths: &[f64]) -> f64 {
    0.9 * epsilon_bound(lengths)
}

/// `pi / (4 max l_j sum 1/l_i)`
pub fn epsilon_bound(lengths: &[f64]) -> f64 {
    let max_l = lengths.iter().copied().fold(0.0, f64::max);
    let inv_sum: f64 = lengths.iter().map(|l| 1.0 / l).sum();
    std::f64::consts::PI / (4.0 * max_l * inv_sum)
}

// |sin(x + iy)| >= |sin x|, so any k whose real part is an allowed level passes.
fn check_allowed(lengths: &[f64], k: Complex64, trig: &Trig) -> Result<()> {
    let margin = default_epsilon(lengths).sin() * (1.0 - 1e-9);
    match trig.sin.iter().position(|s| s.norm() < margin) {
        Some(i) => Err(Error::ForbiddenRegion {
            k: k.re,
            edge: i + 1,
            sine: trig.sin[i].norm(),
        }),
        None => Ok(()),
    }
}

/// Truncated `1/k + 1/k^2` expansion of `ln(phi / prod(-k sin k l_i))` or of `ln(phi / phi_0)`.
pub fn log_ratio(
    g: &MetricGraph,
    h: &HermitianCoupling,
    k: Complex64,
    variant: LogRatioVariant,
) -> Result<SecularValue> {
    if k == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroWavenumber);
    }
    let data = ExpansionData::new(g, h);
    let d = g.edge_count();
    let t = Trig::new(&data.lengths, k);
    check_allowed(&data.lengths, k, &t)?;
    let cot: Vec<Complex64> = t.cos.iter().zip(&t.sin).map(|(c, s)| c / s).collect();
    let k2 = k * k;

    let value = match variant {
        LogRatioVariant::VsProduct => {
            let mut first = Complex64::new(0.0, 0.0);
            let mut second = Complex64::new(0.0, 0.0);
            for i in 0..d {
                let (a, b) = (data.moments[i].a, data.moments[i].b);
                let blk = data.blocks.edges[i];
                let (tr, r) = (blk.trace(), blk.h12.re);
                first += cot[i] * (tr - a) + 2.0 * r / t.sin[i];
                second += cot[i] * cot[i] * (-0.5 * (tr - a) * (tr - a))
                    + (a * tr - b - blk.det())
                    + cot[i] / t.sin[i] * (-2.0 * (tr - a) * r)
                    - 2.0 * r * r / (t.sin[i] * t.sin[i]);
            }
            for i in 0..d {
                for j in i + 1..d {
                    let x = data.blocks.cross(i, j);
                    second += cot[i] * cot[j] * (-x.norm_sqr_sum())
                        + cot[i] / t.sin[j] * (-x.mix_start())
                        + cot[j] / t.sin[i] * (-x.mix_end())
                        + (-x.mix_both()) / (t.sin[i] * t.sin[j]);
                }
            }
            first / k + second / k2
        }
        LogRatioVariant::VsPhi0 => {
            let mut first = Complex64::new(0.0, 0.0);
            let mut second = Complex64::new(0.0, 0.0);
            for i in 0..d {
                let (a, b) = (data.moments[i].a, data.moments[i].b);
                let blk = data.blocks.edges[i];
                first -= cot[i] * a;
                second +=
                    a * blk.trace() / (t.sin[i] * t.sin[i]) - b - 0.5 * cot[i] * cot[i] * a * a
                        + cot[i] / t.sin[i] * (2.0 * a * blk.h12.re);
            }
            first / k + second / k2
        }
    };
    Ok(SecularValue {
        value,
        k,
        variant: match variant {
            LogRatioVariant::VsProduct => SecularVariant::LogRatioProduct,
            LogRatioVariant::VsPhi0 => SecularVariant::LogRatioPhi0,
        },
    })
}

/// `prod_i (-k sin(k l_i))`
pub fn leading_product(lengths: &[f64], k: Complex64) -> Complex64 {
    lengths.iter().map(|&l| -k * (k * l).sin()).product()
}

/// Principal-branch numeric counterpart of [`log_ratio`], built from the
/// determinant. `reference` selects the branch closest to a previously tracked value.
pub fn log_ratio_numeric(
    g: &MetricGraph,
    h: &HermitianCoupling,
    k: Complex64,
    variant: LogRatioVariant,
    reference: Option<Complex64>,
) -> Result<Complex64> {
    let f = SecularFunction::new(g, h, BasisMode::Numeric, SPECTRUM_TOL);
    let num = f.eval_k(k)?;
    let den = match variant {
        LogRatioVariant::VsProduct => leading_product(&g.lengths(), k),
        LogRatioVariant::VsPhi0 => f.with_mode(BasisMode::ZeroPotential).eval_k(k)?,
    };
    let log = (num / den).ln();
    Ok(match reference {
        Some(r) => nearest_branch(log, r.im),
        None => log,
    })
}

/// Shifts the imaginary part of a logarithm by multiples of `2 pi` towards `target`.
pub fn nearest_branch(log: Complex64, target: f64) -> Complex64 {
    let tau = 2.0 * std::f64::consts::PI;
    let turns = ((target - log.im) / tau).round();
    Complex64::new(log.re, log.im + turns * tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CouplingSpec, Edge, Potential};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn graph(edges: Vec<Edge>) -> MetricGraph {
        let d = edges.len();
        MetricGraph::new(edges, CouplingSpec::Hermitian(CMatrix::zeros(2 * d, 2 * d)))
    }

    #[test]
    fn single_edge_zero_potential_matrices() {
        let l = 1.3;
        let k = c(2.2, 0.0);
        let t = transfer_matrices(&graph(vec![Edge::free(l)]), k * k, BasisMode::ZeroPotential)
            .unwrap();
        let (s, co) = ((k * l).sin(), (k * l).cos());
        let m1 = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), co, s / k]);
        let m2 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), k * s, -co]);
        assert!(crate::graph::max_abs(&(t.m1 - m1)) < 1e-14);
        assert!(crate::graph::max_abs(&(t.m2 - m2)) < 1e-14);
    }

    #[test]
    fn block_diagonal_sparsity() {
        let g = graph(vec![
            Edge::new(1.0, Potential::Polynomial(vec![0.0, 1.0])),
            Edge::free(2.0),
        ]);
        let t = transfer_matrices(&g, c(3.0, 1.0), BasisMode::Numeric).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                if r / 2 != col / 2 {
                    assert_eq!(t.m1[(r, col)], c(0.0, 0.0));
                    assert_eq!(t.m2[(r, col)], c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn neumann_interval_phi() {
        let g = graph(vec![Edge::free(PI)]);
        let h = HermitianCoupling::zero(1);
        for k in [0.3, 1.7, 4.4] {
            let v = phi(&g, &h, c(k * k, 0.0), BasisMode::Numeric)
                .unwrap()
                .value;
            let expected = -k * (k * PI).sin();
            assert!(
                (v - expected).norm() <= 1e-10 * expected.abs().max(1e-3),
                "k={k}"
            );
        }
    }

    #[test]
    fn robin_phi_hand_determinant() {
        let (h0, hl, l) = (1.0, 2.0, PI);
        let g = graph(vec![Edge::free(l)]);
        let h = HermitianCoupling::robin(h0, hl);
        for k in [0.7, 2.3, 5.1] {
            let v = phi(&g, &h, c(k * k, 0.0), BasisMode::ZeroPotential)
                .unwrap()
                .value;
            let expected =
                h0 * hl * (k * l).sin() / k - (h0 + hl) * (k * l).cos() - k * (k * l).sin();
            assert!((v - expected).norm() < 1e-12);
            let e = phi_expanded(&g, &h, c(k, 0.0)).unwrap().value;
            let approx = -k * (k * l).sin() - (h0 + hl) * (k * l).cos();
            assert!((e - approx).norm() < 1e-12);
        }
    }

    #[test]
    fn expanded_reduces_to_product_without_corrections() {
        let g = graph(vec![Edge::free(1.0), Edge::free(2.0), Edge::free(0.5)]);
        let h = HermitianCoupling::zero(3);
        let k = c(3.7, 0.2);
        let e = phi_expanded(&g, &h, k).unwrap().value;
        assert!((e - leading_product(&g.lengths(), k)).norm() < 1e-12);
        for variant in [LogRatioVariant::VsProduct, LogRatioVariant::VsPhi0] {
            let v = log_ratio(&g, &h, c(10.3, 0.0), variant);
            assert!(v.is_err() || v.unwrap().value.norm() == 0.0);
        }
    }

    #[test]
    fn log_ratio_vanishes_for_zero_potential() {
        let g = graph(vec![Edge::free(PI)]);
        let h = HermitianCoupling::robin(0.4, -0.3);
        let v = log_ratio(&g, &h, c(10.5, 0.0), LogRatioVariant::VsPhi0).unwrap();
        assert_eq!(v.value, c(0.0, 0.0));
        let g = graph(vec![Edge::free(PI)]);
        let v = log_ratio(
            &g,
            &HermitianCoupling::zero(1),
            c(10.5, 0.0),
            LogRatioVariant::VsProduct,
        )
        .unwrap();
        assert_eq!(v.value, c(0.0, 0.0));
        assert!(matches!(
            log_ratio(&g, &h, c(10.0, 0.0), LogRatioVariant::VsPhi0),
            Err(Error::ForbiddenRegion { .. })
        ));
    }

    #[test]
    fn branch_selection() {
        let tau = 2.0 * PI;
        let v = nearest_branch(c(0.1, 0.2), 0.2 + 2.0 * tau + 0.5);
        assert!((v.im - (0.2 + 2.0 * tau)).abs() < 1e-12);
    }
}
