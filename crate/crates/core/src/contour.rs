//! Adaptive contour quadrature in the `k`-plane, zero counting by the argument
//! principle, the residue table for trigonometric integrands, and the
//! comparison of zero counts of `phi` with those of `prod(-k sin k l_i)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{block_entries, potential_moments, HermitianCoupling, MetricGraph};
use crate::secular::{default_epsilon, BasisMode, SecularFunction, CONTOUR_TOL};

/// Largest admissible `|Im k| * sum l_i` on a counting contour; beyond this the
/// secular function leaves the floating-point range.
pub const MAX_GROWTH_EXPONENT: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line {
        from: Complex64,
        to: Complex64,
    },
    /// Arc `center + radius e^{i theta}` for `theta` running from `start` to `end`.
    Arc {
        center: Complex64,
        radius: f64,
        start: f64,
        end: f64,
    },
}

impl Segment {
    fn point(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * t,
            Segment::Arc {
                center,
                radius,
                start,
                end,
            } => center + Complex64::from_polar(radius, start + (end - start) * t),
        }
    }

    fn tangent(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc {
                radius, start, end, ..
            } => {
                Complex64::i()
                    * Complex64::from_polar(radius, start + (end - start) * t)
                    * (end - start)
            }
        }
    }

    pub fn start_point(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end_point(&self) -> Complex64 {
        self.point(1.0)
    }
}

/// Oriented path made of line segments and circular arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPath {
    pub segments: Vec<Segment>,
    pub closed: bool,
}

impl ContourPath {
    /// Polygon through `vertices`; closed paths return to the first vertex.
    pub fn polygon(vertices: &[Complex64], closed: bool) -> Self {
        let mut segments: Vec<Segment> = vertices
            .windows(2)
            .map(|w| Segment::Line {
                from: w[0],
                to: w[1],
            })
            .collect();
        if closed && vertices.len() > 1 {
            segments.push(Segment::Line {
                from: vertices[vertices.len() - 1],
                to: vertices[0],
            });
        }
        Self { segments, closed }
    }

    /// Counterclockwise rectangle `[re0, re1] x [im0, im1]`.
    pub fn rectangle(re0: f64, re1: f64, im0: f64, im1: f64) -> Self {
        let v = [
            Complex64::new(re0, im0),
            Complex64::new(re1, im0),
            Complex64::new(re1, im1),
            Complex64::new(re0, im1),
        ];
        Self::polygon(&v, true)
    }

    /// Counterclockwise square with vertices `+-n +- i n`.
    pub fn square(n: f64) -> Self {
        Self::rectangle(-n, n, -n, n)
    }

    /// Counterclockwise circle.
    pub fn circle(center: Complex64, radius: f64) -> Self {
        Self {
            segments: vec![Segment::Arc {
                center,
                radius,
                start: 0.0,
                end: 2.0 * PI,
            }],
            closed: true,
        }
    }

    pub fn is_consistent(&self) -> bool {
        let tol = 1e-12;
        let joined = self.segments.windows(2).all(|w| {
            (w[0].end_point() - w[1].start_point()).norm()
                <= tol * (1.0 + w[1].start_point().norm())
        });
        let closes = match (self.segments.first(), self.segments.last()) {
            (Some(a), Some(b)) if self.closed => {
                (b.end_point() - a.start_point()).norm() <= tol * (1.0 + a.start_point().norm())
            }
            _ => true,
        };
        joined && closes
    }

    /// Largest `|Im k|` on the path.
    pub fn max_imag(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| match *s {
                Segment::Line { from, to } => from.im.abs().max(to.im.abs()),
                Segment::Arc { center, radius, .. } => center.im.abs() + radius,
            })
            .fold(0.0, f64::max)
    }
}

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];
const MAX_PANELS: usize = 50_000;

struct Panel {
    segment: usize,
    t0: f64,
    t1: f64,
    values: Vec<Complex64>,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F>(
    f: &mut F,
    seg: &Segment,
    index: usize,
    t0: f64,
    t1: f64,
    width: usize,
) -> Result<Panel>
where
    F: FnMut(Complex64) -> Result<Vec<Complex64>>,
{
    let mid = 0.5 * (t0 + t1);
    let half = 0.5 * (t1 - t0);
    let mut eval = |x: f64| -> Result<Vec<Complex64>> {
        let t = mid + half * x;
        let z = seg.point(t);
        let dz = seg.tangent(t);
        let mut v = f(z)?;
        if v.len() != width {
            return Err(Error::SizeMismatch(format!(
                "integrand returned {} values, expected {width}",
                v.len()
            )));
        }
        for x in v.iter_mut() {
            *x *= dz;
            if !(x.re.is_finite() && x.im.is_finite()) {
                return Err(Error::PoleOnPath(format!("{z}")));
            }
        }
        Ok(v)
    };
    let centre = eval(0.0)?;
    let mut kronrod: Vec<Complex64> = centre.iter().map(|v| v * KRONROD_WEIGHTS[7]).collect();
    let mut gauss: Vec<Complex64> = centre.iter().map(|v| v * GAUSS_WEIGHTS[3]).collect();
    for j in 0..7 {
        let x = KRONROD_NODES[j];
        let (plus, minus) = (eval(x)?, eval(-x)?);
        for c in 0..width {
            let pair = plus[c] + minus[c];
            kronrod[c] += pair * KRONROD_WEIGHTS[j];
            if j % 2 == 1 {
                gauss[c] += pair * GAUSS_WEIGHTS[j / 2];
            }
        }
    }
    let error = kronrod
        .iter()
        .zip(&gauss)
        .map(|(k, g)| ((k - g) * half).norm())
        .sum();
    Ok(Panel {
        segment: index,
        t0,
        t1,
        values: kronrod.iter().map(|k| k * half).collect(),
        error,
    })
}

/// Integrates `width` functions at once along `path` by globally adaptive
/// 7/15-point Gauss–Kronrod panels.
///
/// The panel with the largest error estimate (summed over components) is
/// bisected until the total estimate drops below `tol`.
pub fn integrate_contour_many<F>(
    mut f: F,
    path: &ContourPath,
    width: usize,
    tol: f64,
) -> Result<Vec<Complex64>>
where
    F: FnMut(Complex64) -> Result<Vec<Complex64>>,
{
    if !(tol > 0.0) {
        return Err(Error::BadTolerance(tol));
    }
    let mut heap = BinaryHeap::new();
    for (i, seg) in path.segments.iter().enumerate() {
        for p in 0..2 {
            heap.push(gauss_kronrod(
                &mut f,
                seg,
                i,
                p as f64 / 2.0,
                (p + 1) as f64 / 2.0,
                width,
            )?);
        }
    }
    loop {
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= tol {
            let mut total = vec![Complex64::new(0.0, 0.0); width];
            for p in heap.iter() {
                for (t, v) in total.iter_mut().zip(&p.values) {
                    *t += v;
                }
            }
            return Ok(total);
        }
        if heap.len() >= MAX_PANELS {
            return Err(Error::QuadratureNotConverged { error, tol });
        }
        let worst = heap.pop().expect("nonempty panel set");
        let seg = &path.segments[worst.segment];
        let mid = 0.5 * (worst.t0 + worst.t1);
        if mid - worst.t0 <= 1e-14 * (1.0 + worst.t0.abs()) {
            return Err(Error::PoleOnPath(format!("{}", seg.point(mid))));
        }
        heap.push(gauss_kronrod(
            &mut f,
            seg,
            worst.segment,
            worst.t0,
            mid,
            width,
        )?);
        heap.push(gauss_kronrod(
            &mut f,
            seg,
            worst.segment,
            mid,
            worst.t1,
            width,
        )?);
    }
}

/// `int_path f(k) dk`; see [`integrate_contour_many`].
pub fn integrate_contour<F>(mut f: F, path: &ContourPath, tol: f64) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    Ok(integrate_contour_many(|z| Ok(vec![f(z)?]), path, 1, tol)?[0])
}

/// Normalized argument-principle moments `s_p = (1 / 2 pi i) int w^p f'/f dz`
/// with `w = (z - centre) / radius`, `p = 0..=max_power`, over a closed path.
///
/// `log_derivative` returns `(f(z), f'(z)/f(z))`. `s_0` is the zero count and
/// `s_p` the power sum of the scaled zeros. A zero closer to the path than
/// `10 * tol` shows up as `|f'/f| >= 1 / (10 tol)` at some node or as a
/// non-integer `s_0`, and is reported as `BoundaryTooClose`.
pub fn argument_moments<F>(
    mut log_derivative: F,
    path: &ContourPath,
    centre: Complex64,
    radius: f64,
    max_power: usize,
    tol: f64,
) -> Result<(usize, Vec<Complex64>)>
where
    F: FnMut(Complex64) -> Result<(Complex64, Complex64)>,
{
    let mut worst = (0.0f64, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let integral = integrate_contour_many(
        |z| {
            let (value, ld) = log_derivative(z)?;
            if ld.norm() > worst.0 {
                worst = (ld.norm(), z, value);
            }
            let w = (z - centre) / radius;
            let mut out = Vec::with_capacity(max_power + 1);
            let mut power = Complex64::new(1.0, 0.0);
            for _ in 0..=max_power {
                out.push(ld * power);
                power *= w;
            }
            Ok(out)
        },
        path,
        max_power + 1,
        tol * 2.0 * PI,
    );
    let too_close = |worst: (f64, Complex64, Complex64)| Error::BoundaryTooClose {
        at: format!("{}", worst.1),
        residual: worst.2.norm(),
    };
    let near = worst.0 * tol * 10.0 >= 1.0;
    let integral = match integral {
        Ok(v) => v,
        Err(Error::QuadratureNotConverged { .. }) | Err(Error::PoleOnPath(_)) if near => {
            return Err(too_close(worst))
        }
        Err(e) => return Err(e),
    };
    if near {
        return Err(too_close(worst));
    }
    let moments: Vec<Complex64> = integral
        .iter()
        .map(|v| v / Complex64::new(0.0, 2.0 * PI))
        .collect();
    let winding = moments[0];
    let rounded = winding.re.round();
    if (winding.re - rounded).abs() > 0.05 || winding.im.abs() > 0.05 || rounded < 0.0 {
        return Err(too_close(worst));
    }
    Ok((rounded as usize, moments))
}

/// Winding-number count of the zeros of `f` inside a closed path; see [`argument_moments`].
pub fn count_zeros<F>(log_derivative: F, path: &ContourPath, tol: f64) -> Result<usize>
where
    F: FnMut(Complex64) -> Result<(Complex64, Complex64)>,
{
    Ok(argument_moments(log_derivative, path, Complex64::new(0.0, 0.0), 1.0, 0, tol)?.0)
}

/// Zeros of `phi(k)` inside a closed `k`-plane path, counted with multiplicity.
pub fn count_secular_zeros(
    f: &SecularFunction<'_>,
    path: &ContourPath,
    quad_tol: f64,
) -> Result<usize> {
    let total: f64 = f.graph().lengths().iter().sum();
    let reach = path.max_imag() * total;
    if reach > MAX_GROWTH_EXPONENT {
        return Err(Error::LevelTooLarge(path.max_imag()));
    }
    let f = f.frozen_at(&k_plane_references(path))?;
    count_zeros(|k| f.log_derivative_k(k), path, quad_tol)
}

/// `lambda = k^2` at the corners of the bounding box of `path`, where the
/// edge equations are stiffest.
pub fn k_plane_references(path: &ContourPath) -> Vec<Complex64> {
    let (re, im) = bounding_box(path);
    let mut refs = Vec::with_capacity(4);
    for x in [re.0, re.1] {
        for y in [im.0, im.1] {
            let k = Complex64::new(x, y);
            refs.push(k * k);
        }
    }
    refs
}

/// `((min Re, max Re), (min Im, max Im))` over the path.
pub fn bounding_box(path: &ContourPath) -> ((f64, f64), (f64, f64)) {
    let mut re = (f64::INFINITY, f64::NEG_INFINITY);
    let mut im = (f64::INFINITY, f64::NEG_INFINITY);
    for seg in &path.segments {
        let pts: Vec<Complex64> = match *seg {
            Segment::Line { from, to } => vec![from, to],
            Segment::Arc { center, radius, .. } => vec![
                center - radius,
                center + radius,
                center - Complex64::new(0.0, radius),
                center + Complex64::new(0.0, radius),
            ],
        };
        for p in pts {
            re = (re.0.min(p.re), re.1.max(p.re));
            im = (im.0.min(p.im), im.1.max(p.im));
        }
    }
    (re, im)
}

/// Integrands of the residue table; each is integrated over a small circle
/// around `n pi / l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResidueKind {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
    L,
    M,
}

impl ResidueKind {
    pub const ALL: [ResidueKind; 13] = [
        ResidueKind::A,
        ResidueKind::B,
        ResidueKind::C,
        ResidueKind::D,
        ResidueKind::E,
        ResidueKind::F,
        ResidueKind::G,
        ResidueKind::H,
        ResidueKind::I,
        ResidueKind::J,
        ResidueKind::K,
        ResidueKind::L,
        ResidueKind::M,
    ];

    pub fn letter(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.letter() == c.to_ascii_lowercase())
    }

    /// Whether the entry is defined for this `n`.
    pub fn accepts(self, n: i64) -> bool {
        use ResidueKind::*;
        match self {
            A | B => true,
            C | E | G | I | K => n != 0,
            D | F | H | J | L | M => n == 0,
        }
    }

    pub fn integrand(self, k: Complex64, length: f64) -> Complex64 {
        use ResidueKind::*;
        let arg = k * length;
        let (sin, cos) = (arg.sin(), arg.cos());
        let cot = cos / sin;
        match self {
            A => cot,
            B => 1.0 / sin,
            C | D => cot / k,
            E | F => 1.0 / (k * sin),
            G | H => cot * cot / k,
            I | J => cot / (k * sin),
            K | L => 1.0 / (k * sin * sin),
            M => 1.0 / k,
        }
    }
}

/// Closed-form value of `(1 / 2 pi i)` times the integral of `kind`'s integrand
/// around `n pi / l`.
pub fn residue_reference(kind: ResidueKind, n: i64, length: f64) -> Result<Complex64> {
    use ResidueKind::*;
    if !kind.accepts(n) {
        return Err(Error::IncompatibleIndex {
            kind: kind.letter(),
            n,
        });
    }
    let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let npi = n as f64 * PI;
    let value = match kind {
        A => 1.0 / length,
        B => sign / length,
        C => 1.0 / npi,
        D | F => 0.0,
        E => sign / npi,
        G | K => -1.0 / (npi * npi),
        H => -2.0 / 3.0,
        I => -sign / (npi * npi),
        J => -1.0 / 6.0,
        L => 1.0 / 3.0,
        M => 1.0,
    };
    Ok(Complex64::new(value, 0.0))
}

/// Numerical counterpart of [`residue_reference`] on the circle of radius
/// `pi / (4 l)` around `n pi / l`.
pub fn residue_numeric(kind: ResidueKind, n: i64, length: f64, tol: f64) -> Result<Complex64> {
    if !kind.accepts(n) {
        return Err(Error::IncompatibleIndex {
            kind: kind.letter(),
            n,
        });
    }
    let centre = Complex64::new(n as f64 * PI / length, 0.0);
    let path = ContourPath::circle(centre, PI / (4.0 * length));
    let integral = integrate_contour(|k| Ok(kind.integrand(k, length)), &path, tol * 2.0 * PI)?;
    Ok(integral / Complex64::new(0.0, 2.0 * PI))
}

/// `e^{|Im k| l} / |sin(k l)|`
pub fn sine_margin(k: Complex64, length: f64) -> Result<f64> {
    let growth = (k.im.abs() * length).exp();
    let sine = (k * length).sin().norm();
    if sine <= 1e-13 * growth * (1.0 + (k.re * length).abs()) {
        return Err(Error::SineZero(k.re));
    }
    Ok(growth / sine)
}

/// Counts the zeros of `phi` and of `prod_i (-k sin k l_i)` inside the square
/// with vertices `+-level +- i level`; the second count is closed form.
pub fn rouche_verify(
    g: &MetricGraph,
    h: &HermitianCoupling,
    level: f64,
    quad_tol: f64,
) -> Result<(usize, usize)> {
    let lengths = g.lengths();
    let eps = default_epsilon(&lengths);
    for (i, &l) in lengths.iter().enumerate() {
        let sine = (level * l).sin().abs();
        if sine < eps.sin() * (1.0 - 1e-9) {
            return Err(Error::ForbiddenRegion {
                k: level,
                edge: i + 1,
                sine,
            });
        }
    }
    let f = SecularFunction::new(g, h, BasisMode::Numeric, CONTOUR_TOL);
    let zeros_phi = count_secular_zeros(&f, &ContourPath::square(level), quad_tol)?;
    Ok((zeros_phi, product_zero_count(&lengths, level)))
}

/// `2 d + 2 sum floor(level l_i / pi)`: zeros of `prod(-k sin k l_i)` in the square of half-width `level`.
/// Level above which the zero counts of `phi` and of the product are expected
/// to agree: the first-order shift `(2/l_i)|a_i - Tr H_i -+ 2 Re H_12i|` of
/// `lambda`, divided by `2N`, must stay below the margin `epsilon / l_i`.
pub fn rouche_threshold(g: &MetricGraph, h: &HermitianCoupling) -> f64 {
    let eps = default_epsilon(&g.lengths());
    let blocks = block_entries(h);
    g.edges
        .iter()
        .zip(&blocks.edges)
        .map(|(e, b)| (potential_moments(e).a.abs() + b.trace().abs() + 2.0 * b.h12.re.abs()) / eps)
        .fold(0.0, f64::max)
}

pub fn product_zero_count(lengths: &[f64], level: f64) -> usize {
    2 * lengths.len()
        + 2 * lengths
            .iter()
            .map(|l| (level * l / PI).floor() as usize)
            .sum::<usize>()
}
