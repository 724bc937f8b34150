//! Problem definition: metric graph, edge potentials and vertex couplings.
//!
//! Boundary values are ordered globally as `(start_1, end_1, start_2, end_2, ...)`,
//! i.e. endpoint `2j` is the start and `2j + 1` the end of edge `j` (0-based).
//! Every coupling matrix in the crate uses this ordering.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;
const MINUS_ONE_TOL: f64 = 1e-10;

/// Real potential on a single edge, in the edge's own coordinate `x in [0, l]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Zero,
    Constant(f64),
    /// Coefficients in ascending powers of `x`.
    Polynomial(Vec<f64>),
    /// Piecewise-linear interpolant through `(xs[k], qs[k])`.
    Table {
        xs: Vec<f64>,
        qs: Vec<f64>,
    },
}

impl Potential {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Constant(c) => *c,
            Potential::Polynomial(coeffs) => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            Potential::Table { xs, qs } => {
                if x <= xs[0] {
                    return qs[0];
                }
                let last = xs.len() - 1;
                if x >= xs[last] {
                    return qs[last];
                }
                let k = xs.partition_point(|&t| t <= x).min(last).max(1);
                let (x0, x1) = (xs[k - 1], xs[k]);
                let w = (x - x0) / (x1 - x0);
                qs[k - 1] + w * (qs[k] - qs[k - 1])
            }
        }
    }

    /// Exact integral over `[0, length]` (of the interpolant for tables).
    pub fn integral(&self, length: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Constant(c) => c * length,
            Potential::Polynomial(coeffs) => {
                coeffs
                    .iter()
                    .enumerate()
                    .rev()
                    .fold(0.0, |acc, (p, c)| acc * length + c / (p + 1) as f64)
                    * length
            }
            Potential::Table { xs, qs } => xs
                .windows(2)
                .zip(qs.windows(2))
                .map(|(x, q)| 0.5 * (x[1] - x[0]) * (q[0] + q[1]))
                .sum(),
        }
    }

    /// Constant value, if the potential is constant on the whole edge.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Potential::Zero => Some(0.0),
            Potential::Constant(c) => Some(*c),
            Potential::Polynomial(coeffs) if coeffs.iter().skip(1).all(|&c| c == 0.0) => {
                Some(coeffs.first().copied().unwrap_or(0.0))
            }
            _ => None,
        }
    }

    /// Interior points where the potential is not smooth.
    pub fn breakpoints(&self, length: f64) -> Vec<f64> {
        match self {
            Potential::Table { xs, .. } => xs
                .iter()
                .copied()
                .filter(|&x| x > 0.0 && x < length)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// A guaranteed lower bound for `q` on `[0, length]`.
    pub fn lower_bound(&self, length: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Constant(c) => *c,
            Potential::Polynomial(coeffs) => {
                let mut bound = coeffs.first().copied().unwrap_or(0.0);
                let mut power = 1.0;
                for c in coeffs.iter().skip(1) {
                    power *= length.max(1.0);
                    bound -= c.abs() * power;
                }
                bound
            }
            Potential::Table { qs, .. } => qs.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub length: f64,
    pub potential: Potential,
}

impl Edge {
    pub fn new(length: f64, potential: Potential) -> Self {
        Self { length, potential }
    }

    pub fn free(length: f64) -> Self {
        Self::new(length, Potential::Zero)
    }
}

/// Coupling of the endpoints meeting at one vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexCoupling {
    pub matrix: CMatrix,
    /// 0-based global endpoint indices, in the order of the matrix rows.
    pub endpoints: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CouplingSpec {
    Hermitian(CMatrix),
    Unitary(CMatrix),
    Vertices(Vec<VertexCoupling>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    pub edges: Vec<Edge>,
    pub coupling: CouplingSpec,
}

impl MetricGraph {
    pub fn new(edges: Vec<Edge>, coupling: CouplingSpec) -> Self {
        Self { edges, coupling }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.length).collect()
    }

    /// Same graph and coupling with every potential set to zero.
    pub fn without_potential(&self) -> Self {
        Self {
            edges: self.edges.iter().map(|e| Edge::free(e.length)).collect(),
            coupling: self.coupling.clone(),
        }
    }

    pub fn hermitian(&self) -> Result<HermitianCoupling> {
        let h = coupling_hermitian(&self.coupling)?;
        if h.edge_count() != self.edge_count() {
            return Err(Error::SizeMismatch(format!(
                "coupling is {}x{}, graph has {} edges",
                h.matrix().nrows(),
                h.matrix().ncols(),
                self.edge_count()
            )));
        }
        Ok(h)
    }
}

/// The Hermitian matrix `H` of the coupling condition `H Psi + Psi' = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianCoupling {
    h: CMatrix,
}

impl HermitianCoupling {
    /// Wraps a matrix after checking it is square, of even size and Hermitian.
    pub fn new(h: CMatrix) -> Result<Self> {
        if h.nrows() != h.ncols() || h.nrows() % 2 != 0 || h.nrows() == 0 {
            return Err(Error::SizeMismatch(format!(
                "Hermitian coupling must be 2d x 2d, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        let defect = max_abs(&(&h - h.adjoint()));
        if defect > HERMITIAN_TOL {
            return Err(Error::NonHermitianInput(defect));
        }
        Ok(Self { h: symmetrize(h) })
    }

    pub fn zero(d: usize) -> Self {
        Self {
            h: CMatrix::zeros(2 * d, 2 * d),
        }
    }

    /// Robin data on a single edge: `H = diag(h_start, h_end)`.
    pub fn robin(h_start: f64, h_end: f64) -> Self {
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 0)] = h_start.into();
        h[(1, 1)] = h_end.into();
        Self { h }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    pub fn edge_count(&self) -> usize {
        self.h.nrows() / 2
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.h[(row, col)]
    }
}

/// Diagonal 2x2 block of `H` belonging to one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeBlock {
    pub h11: f64,
    pub h12: Complex64,
    pub h22: f64,
}

impl EdgeBlock {
    pub fn trace(&self) -> f64 {
        self.h11 + self.h22
    }

    pub fn det(&self) -> f64 {
        self.h11 * self.h22 - self.h12.norm_sqr()
    }
}

/// Off-diagonal 2x2 block coupling edges `i` and `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossBlock {
    pub h11: Complex64,
    pub h12: Complex64,
    pub h21: Complex64,
    pub h22: Complex64,
}

impl CrossBlock {
    pub fn norm_sqr_sum(&self) -> f64 {
        self.h11.norm_sqr() + self.h12.norm_sqr() + self.h21.norm_sqr() + self.h22.norm_sqr()
    }

    /// `2 Re(H11 conj H12 + H22 conj H21)`
    pub fn mix_start(&self) -> f64 {
        2.0 * (self.h11 * self.h12.conj() + self.h22 * self.h21.conj()).re
    }

    /// `2 Re(H11 conj H21 + H22 conj H12)`
    pub fn mix_end(&self) -> f64 {
        2.0 * (self.h11 * self.h21.conj() + self.h22 * self.h12.conj()).re
    }

    /// `2 Re(H12 conj H21 + H11 conj H22)`
    pub fn mix_both(&self) -> f64 {
        2.0 * (self.h12 * self.h21.conj() + self.h11 * self.h22.conj()).re
    }
}

/// Named entries of `H`: edge blocks and the `i < j` cross blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockEntries {
    pub edges: Vec<EdgeBlock>,
    cross: Vec<CrossBlock>,
    d: usize,
}

impl BlockEntries {
    pub fn edge_count(&self) -> usize {
        self.d
    }

    /// Cross block for `i != j`. Stored for `i < j`; the `i > j` block is
    /// recovered from Hermiticity of `H`.
    pub fn cross(&self, i: usize, j: usize) -> CrossBlock {
        assert!(
            i != j && i < self.d && j < self.d,
            "cross block needs distinct edges"
        );
        if i < j {
            self.cross[self.pair_index(i, j)]
        } else {
            let b = self.cross[self.pair_index(j, i)];
            CrossBlock {
                h11: b.h11.conj(),
                h12: b.h21.conj(),
                h21: b.h12.conj(),
                h22: b.h22.conj(),
            }
        }
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        // row-major enumeration of the strict upper triangle
        i * (2 * self.d - i - 1) / 2 + (j - i - 1)
    }
}

/// Potential data entering the asymptotics of one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialMoments {
    /// Half the integral of `q`.
    pub a: f64,
    /// `(q(l) + q(0)) / 4 + (integral of q)^2 / 8`.
    pub b: f64,
    pub q0: f64,
    pub ql: f64,
}

impl PotentialMoments {
    pub fn integral(&self) -> f64 {
        2.0 * self.a
    }

    pub fn endpoint_quarter(&self) -> f64 {
        0.25 * (self.ql + self.q0)
    }
}

pub fn assemble_flower_unitary(vertices: &[VertexCoupling], d: usize) -> Result<CMatrix> {
    let n = 2 * d;
    let mut owner = vec![None; n];
    let mut u = CMatrix::zeros(n, n);
    for (v, vc) in vertices.iter().enumerate() {
        let m = vc.endpoints.len();
        if vc.matrix.nrows() != m || vc.matrix.ncols() != m {
            return Err(Error::SizeMismatch(format!(
                "vertex {} lists {} endpoints but its matrix is {}x{}",
                v + 1,
                m,
                vc.matrix.nrows(),
                vc.matrix.ncols()
            )));
        }
        for &e in &vc.endpoints {
            if e >= n {
                return Err(Error::SizeMismatch(format!(
                    "endpoint {} out of range for {} edges",
                    e + 1,
                    d
                )));
            }
            if owner[e].replace(v).is_some() {
                return Err(Error::OverlappingEndpoints(e + 1));
            }
        }
        let defect = unitarity_defect(&vc.matrix);
        if defect > UNITARY_TOL {
            return Err(Error::NonUnitaryBlock(v + 1, defect));
        }
        for (a, &ea) in vc.endpoints.iter().enumerate() {
            for (b, &eb) in vc.endpoints.iter().enumerate() {
                u[(ea, eb)] = vc.matrix[(a, b)];
            }
        }
    }
    if let Some(free) = owner.iter().position(Option::is_none) {
        return Err(Error::SizeMismatch(format!(
            "endpoint {} is not attached to any vertex",
            free + 1
        )));
    }
    Ok(u)
}

/// Hermitian form `H = -i (U + I)^{-1} (U - I)` of a coupling specification.
pub fn coupling_hermitian(spec: &CouplingSpec) -> Result<HermitianCoupling> {
    match spec {
        CouplingSpec::Hermitian(h) => HermitianCoupling::new(h.clone()),
        CouplingSpec::Unitary(u) => hermitian_from_unitary(u),
        CouplingSpec::Vertices(vs) => {
            let total: usize = vs.iter().map(|v| v.endpoints.len()).sum();
            if total % 2 != 0 {
                return Err(Error::SizeMismatch(format!(
                    "vertices list {total} endpoints, expected an even count"
                )));
            }
            hermitian_from_unitary(&assemble_flower_unitary(vs, total / 2)?)
        }
    }
}

fn hermitian_from_unitary(u: &CMatrix) -> Result<HermitianCoupling> {
    let n = u.nrows();
    if n != u.ncols() || n % 2 != 0 || n == 0 {
        return Err(Error::SizeMismatch(format!(
            "unitary coupling must be 2d x 2d, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let defect = unitarity_defect(u);
    if defect > UNITARY_TOL {
        return Err(Error::NonUnitary(defect));
    }
    let id = CMatrix::identity(n, n);
    let plus = u + &id;
    // U is normal, so the singular values of U + I are |eig(U) + 1|.
    let distance = plus.clone().singular_values().min();
    if distance <= MINUS_ONE_TOL {
        return Err(Error::MinusOneInSpectrum { distance });
    }
    let inv = plus
        .try_inverse()
        .ok_or(Error::MinusOneInSpectrum { distance })?;
    let h = (inv * (u - &id)) * Complex64::new(0.0, -1.0);
    Ok(HermitianCoupling { h: symmetrize(h) })
}

pub fn block_entries(h: &HermitianCoupling) -> BlockEntries {
    let d = h.edge_count();
    let m = h.matrix();
    let edges = (0..d)
        .map(|i| EdgeBlock {
            h11: m[(2 * i, 2 * i)].re,
            h12: m[(2 * i, 2 * i + 1)],
            h22: m[(2 * i + 1, 2 * i + 1)].re,
        })
        .collect();
    let mut cross = Vec::with_capacity(d * d.saturating_sub(1) / 2);
    for i in 0..d {
        for j in i + 1..d {
            cross.push(CrossBlock {
                h11: m[(2 * i, 2 * j)],
                h12: m[(2 * i, 2 * j + 1)],
                h21: m[(2 * i + 1, 2 * j)],
                h22: m[(2 * i + 1, 2 * j + 1)],
            });
        }
    }
    BlockEntries { edges, cross, d }
}

pub fn potential_moments(edge: &Edge) -> PotentialMoments {
    let integral = edge.potential.integral(edge.length);
    let q0 = edge.potential.eval(0.0);
    let ql = edge.potential.eval(edge.length);
    PotentialMoments {
        a: 0.5 * integral,
        b: 0.25 * (ql + q0) + 0.125 * integral * integral,
        q0,
        ql,
    }
}

/// One violated invariant of a [`MetricGraph`]. Edge and endpoint numbers are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    NoEdges,
    NonPositiveLength { edge: usize },
    NonFiniteLength { edge: usize },
    NonFinitePotential { edge: usize },
    TableLengthMismatch { edge: usize },
    TableNotIncreasing { edge: usize },
    TableDomainMismatch { edge: usize },
    CouplingSize { expected: usize, found: usize },
    Coupling(Error),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NoEdges => write!(f, "graph has no edges"),
            Diagnostic::NonPositiveLength { edge } => write!(f, "NonPositiveLength(edge {edge})"),
            Diagnostic::NonFiniteLength { edge } => write!(f, "NonFiniteLength(edge {edge})"),
            Diagnostic::NonFinitePotential { edge } => {
                write!(f, "NonFinitePotential(edge {edge})")
            }
            Diagnostic::TableLengthMismatch { edge } => {
                write!(
                    f,
                    "TableLengthMismatch(edge {edge}): xs and qs differ in length"
                )
            }
            Diagnostic::TableNotIncreasing { edge } => {
                write!(f, "TableNotIncreasing(edge {edge})")
            }
            Diagnostic::TableDomainMismatch { edge } => write!(
                f,
                "TableDomainMismatch(edge {edge}): xs must start at 0 and end at the edge length"
            ),
            Diagnostic::CouplingSize { expected, found } => {
                write!(
                    f,
                    "CouplingSize: expected {expected}x{expected}, found {found}"
                )
            }
            Diagnostic::Coupling(e) => write!(f, "coupling: {e}"),
        }
    }
}

pub fn validate_graph(g: &MetricGraph) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if g.edges.is_empty() {
        out.push(Diagnostic::NoEdges);
    }
    for (idx, e) in g.edges.iter().enumerate() {
        let edge = idx + 1;
        if !e.length.is_finite() {
            out.push(Diagnostic::NonFiniteLength { edge });
            continue;
        }
        if e.length <= 0.0 {
            out.push(Diagnostic::NonPositiveLength { edge });
        }
        match &e.potential {
            Potential::Zero => {}
            Potential::Constant(c) => {
                if !c.is_finite() {
                    out.push(Diagnostic::NonFinitePotential { edge });
                }
            }
            Potential::Polynomial(cs) => {
                if cs.iter().any(|c| !c.is_finite()) {
                    out.push(Diagnostic::NonFinitePotential { edge });
                }
            }
            Potential::Table { xs, qs } => {
                if xs.len() != qs.len() || xs.len() < 2 {
                    out.push(Diagnostic::TableLengthMismatch { edge });
                    continue;
                }
                if xs.iter().chain(qs).any(|v| !v.is_finite()) {
                    out.push(Diagnostic::NonFinitePotential { edge });
                }
                if xs.windows(2).any(|w| w[1] <= w[0]) {
                    out.push(Diagnostic::TableNotIncreasing { edge });
                }
                let scale = e.length.abs().max(1.0);
                if xs[0] != 0.0 || (xs[xs.len() - 1] - e.length).abs() > 1e-12 * scale {
                    out.push(Diagnostic::TableDomainMismatch { edge });
                }
            }
        }
    }
    let expected = 2 * g.edges.len();
    let found = match &g.coupling {
        CouplingSpec::Hermitian(m) | CouplingSpec::Unitary(m) => (m.nrows() == m.ncols())
            .then_some(m.nrows())
            .unwrap_or(usize::MAX),
        CouplingSpec::Vertices(vs) => vs.iter().map(|v| v.endpoints.len()).sum(),
    };
    if found != expected {
        out.push(Diagnostic::CouplingSize { expected, found });
    } else if let Err(e) = coupling_hermitian(&g.coupling) {
        out.push(Diagnostic::Coupling(e));
    }
    out
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn unitarity_defect(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let id = CMatrix::identity(u.nrows(), u.ncols());
    max_abs(&(u * u.adjoint() - id))
}

fn symmetrize(h: CMatrix) -> CMatrix {
    let adj = h.adjoint();
    (h + adj) * Complex64::new(0.5, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn flower_of_identity_blocks_is_identity() {
        let vs = vec![
            VertexCoupling {
                matrix: CMatrix::identity(2, 2),
                endpoints: vec![0, 2],
            },
            VertexCoupling {
                matrix: CMatrix::identity(2, 2),
                endpoints: vec![1, 3],
            },
        ];
        let u = assemble_flower_unitary(&vs, 2).unwrap();
        assert_eq!(u, CMatrix::identity(4, 4));
    }

    #[test]
    fn flower_single_block_is_that_block() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let w = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, s), c(0.0, s), c(s, 0.0)]);
        let u = assemble_flower_unitary(
            &[VertexCoupling {
                matrix: w.clone(),
                endpoints: vec![0, 1],
            }],
            1,
        )
        .unwrap();
        assert_eq!(u, w);
    }

    #[test]
    fn flower_rejects_overlap_and_bad_blocks() {
        let vs = vec![
            VertexCoupling {
                matrix: CMatrix::identity(2, 2),
                endpoints: vec![0, 1],
            },
            VertexCoupling {
                matrix: CMatrix::identity(2, 2),
                endpoints: vec![1, 2],
            },
        ];
        assert_eq!(
            assemble_flower_unitary(&vs, 2),
            Err(Error::OverlappingEndpoints(2))
        );

        let vs = vec![VertexCoupling {
            matrix: CMatrix::identity(3, 3),
            endpoints: vec![0, 1],
        }];
        assert!(matches!(
            assemble_flower_unitary(&vs, 1),
            Err(Error::SizeMismatch(_))
        ));

        let mut m = CMatrix::identity(2, 2);
        m[(0, 0)] = c(2.0, 0.0);
        let vs = vec![VertexCoupling {
            matrix: m,
            endpoints: vec![0, 1],
        }];
        assert!(matches!(
            assemble_flower_unitary(&vs, 1),
            Err(Error::NonUnitaryBlock(1, _))
        ));
    }

    #[test]
    fn neumann_and_excluded_couplings() {
        let h = coupling_hermitian(&CouplingSpec::Unitary(CMatrix::identity(6, 6))).unwrap();
        assert_eq!(max_abs(h.matrix()), 0.0);
        let minus = CMatrix::identity(2, 2) * c(-1.0, 0.0);
        assert!(matches!(
            coupling_hermitian(&CouplingSpec::Unitary(minus)),
            Err(Error::MinusOneInSpectrum { .. })
        ));
    }

    #[test]
    fn scalar_unitary_i_gives_unit_robin() {
        // -i (u - 1)/(u + 1) at u = i equals 1
        let u = CMatrix::identity(2, 2) * c(0.0, 1.0);
        let h = coupling_hermitian(&CouplingSpec::Unitary(u)).unwrap();
        let expected = CMatrix::identity(2, 2);
        assert!(max_abs(&(h.matrix() - expected)) < 1e-14);
    }

    #[test]
    fn block_entries_read_off() {
        let h =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 2.0), c(0.0, -2.0), c(3.0, 0.0)]);
        let b = block_entries(&HermitianCoupling::new(h).unwrap());
        let e = b.edges[0];
        assert_eq!((e.h11, e.h12, e.h22), (1.0, c(0.0, 2.0), 3.0));
        assert_eq!(e.trace(), 4.0);
        assert_eq!(e.det(), -1.0);

        let z = c(0.3, -0.7);
        let mut h = CMatrix::zeros(4, 4);
        h[(0, 2)] = z;
        h[(2, 0)] = z.conj();
        let b = block_entries(&HermitianCoupling::new(h).unwrap());
        let x = b.cross(0, 1);
        assert_eq!(x.h11, z);
        assert_eq!(
            (x.h12, x.h21, x.h22),
            (c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
        );
        assert_eq!(b.cross(1, 0).h11, z.conj());

        let zero = block_entries(&HermitianCoupling::zero(3));
        assert!(zero
            .edges
            .iter()
            .all(|e| e.trace() == 0.0 && e.h12 == c(0.0, 0.0)));
        assert_eq!(zero.cross(0, 2).norm_sqr_sum(), 0.0);
    }

    #[test]
    fn cross_block_index_covers_all_pairs() {
        let d = 4;
        let mut h = CMatrix::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in i + 1..d {
                let z = c((10 * i + j) as f64, 1.0);
                h[(2 * i + 1, 2 * j)] = z;
                h[(2 * j, 2 * i + 1)] = z.conj();
            }
        }
        let b = block_entries(&HermitianCoupling::new(h).unwrap());
        for i in 0..d {
            for j in i + 1..d {
                assert_eq!(b.cross(i, j).h21, c((10 * i + j) as f64, 1.0));
                assert_eq!(b.cross(j, i).h12, c((10 * i + j) as f64, -1.0));
            }
        }
    }

    #[test]
    fn moments_closed_forms() {
        let m = potential_moments(&Edge::free(PI));
        assert_eq!((m.a, m.b), (0.0, 0.0));

        let (c0, l) = (1.7, 2.3);
        let m = potential_moments(&Edge::new(l, Potential::Constant(c0)));
        assert!((m.a - c0 * l / 2.0).abs() < 1e-14);
        assert!((m.b - (c0 / 2.0 + c0 * c0 * l * l / 8.0)).abs() < 1e-13);

        let m = potential_moments(&Edge::new(PI, Potential::Polynomial(vec![0.0, 0.0, 1.0])));
        assert!((m.a - PI.powi(3) / 6.0).abs() < 1e-13);
        assert!((m.b - (PI * PI / 4.0 + PI.powi(6) / 72.0)).abs() < 1e-11);
    }

    #[test]
    fn table_interpolant_integral_and_eval() {
        let p = Potential::Table {
            xs: vec![0.0, 1.0, 3.0],
            qs: vec![1.0, 3.0, -1.0],
        };
        assert_eq!(p.eval(0.5), 2.0);
        assert_eq!(p.eval(2.0), 1.0);
        assert_eq!(p.eval(3.0), -1.0);
        assert_eq!(p.integral(3.0), 2.0 + 2.0);
        assert_eq!(p.breakpoints(3.0), vec![1.0]);
    }

    #[test]
    fn validation_diagnostics() {
        let good = MetricGraph::new(
            vec![Edge::free(1.0), Edge::free(2.0)],
            CouplingSpec::Unitary(CMatrix::identity(4, 4)),
        );
        assert!(validate_graph(&good).is_empty());

        let mut bad = good.clone();
        bad.edges[0].length = 0.0;
        assert_eq!(
            validate_graph(&bad),
            vec![Diagnostic::NonPositiveLength { edge: 1 }]
        );

        let mut bad = good.clone();
        bad.edges[1].potential = Potential::Table {
            xs: vec![0.0, 1.0],
            qs: vec![0.0, 1.0],
        };
        assert_eq!(
            validate_graph(&bad),
            vec![Diagnostic::TableDomainMismatch { edge: 2 }]
        );

        let bad = MetricGraph::new(
            vec![Edge::free(1.0)],
            CouplingSpec::Unitary(CMatrix::identity(2, 2) * c(-1.0, 0.0)),
        );
        assert!(matches!(
            validate_graph(&bad)[..],
            [Diagnostic::Coupling(Error::MinusOneInSpectrum { .. })]
        ));
    }
}
