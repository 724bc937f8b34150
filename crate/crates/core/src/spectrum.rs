//! Eigenvalues with multiplicity, the `mu`-sequence of zeros of
//! `prod sin(k l_i)`, allowed levels, and the per-edge partition of the spectrum.
//!
//! Eigenvalues are located window by window. Above the first allowed level,
//! each window is a box `[N_p, N_{p+1}] x [-h, h]` in the `k`-plane; below it,
//! one box in the `lambda`-plane reaches down to a lower bound on the spectrum.
//! In every box the argument principle gives the zero count and the power sums
//! of the zeros, from which starting values are read off; these are refined on
//! the real `lambda` axis, where `phi` is real.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::wavenumber;
use crate::contour::{argument_moments, count_secular_zeros, ContourPath};
use crate::error::{Error, Result};
use crate::graph::{HermitianCoupling, MetricGraph, Potential};
use crate::secular::{
    default_epsilon, epsilon_bound, BasisMode, SecularFunction, CONTOUR_TOL, COUNT_TOL,
    SPECTRUM_TOL,
};

/// Default absolute tolerance of the box quadratures.
pub const DEFAULT_QUAD_TOL: f64 = 1e-8;
/// Tolerance of the moment quadratures that only seed the real-axis refinement.
const SEED_QUAD_TOL: f64 = 1e-5;

/// One zero of `prod sin(k l_i)`; `edge` is `None` for the `d` leading zeros.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuEntry {
    pub value: f64,
    pub edge: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuSequence {
    pub entries: Vec<MuEntry>,
}

impl MuSequence {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }
}

/// Zeros `n pi / l_i <= k_max`, preceded by `d` zeros; coincident zeros are listed
/// once per vanishing edge, in edge order.
pub fn mu_sequence(g: &MetricGraph, k_max: f64) -> MuSequence {
    mu_sequence_for_lengths(&g.lengths(), k_max)
}

pub fn mu_sequence_for_lengths(lengths: &[f64], k_max: f64) -> MuSequence {
    let mut entries: Vec<MuEntry> = Vec::new();
    for (i, &l) in lengths.iter().enumerate() {
        let top = (k_max * l / PI).floor() as u64;
        for n in 1..=top {
            let value = n as f64 * PI / l;
            if value <= k_max {
                entries.push(MuEntry {
                    value,
                    edge: Some(i),
                });
            }
        }
    }
    entries.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.edge.cmp(&b.edge)));
    // values that differ only by rounding are ties
    let mut start = 0;
    while start < entries.len() {
        let mut end = start + 1;
        while end < entries.len()
            && entries[end].value - entries[start].value <= 1e-12 * entries[start].value.max(1.0)
        {
            end += 1;
        }
        entries[start..end].sort_by_key(|e| e.edge);
        start = end;
    }
    let mut all = vec![
        MuEntry {
            value: 0.0,
            edge: None
        };
        lengths.len()
    ];
    all.extend(entries);
    MuSequence { entries: all }
}

/// `d + sum floor(level l_i / pi)`
pub fn weyl_count(lengths: &[f64], level: f64) -> usize {
    lengths.len()
        + lengths
            .iter()
            .map(|l| (level * l / PI).floor() as usize)
            .sum::<usize>()
}

fn resolve_epsilon(lengths: &[f64], epsilon: f64) -> Result<f64> {
    let bound = epsilon_bound(lengths);
    if epsilon == 0.0 {
        Ok(default_epsilon(lengths))
    } else if epsilon > 0.0 && epsilon < bound {
        Ok(epsilon)
    } else {
        Err(Error::EpsilonTooLarge { epsilon, bound })
    }
}

/// Smallest `N >= target` outside every forbidden interval `(n pi - eps, n pi + eps) / l_i`.
/// `epsilon = 0` selects the default margin.
pub fn allowed_level(g: &MetricGraph, epsilon: f64, target: f64) -> Result<f64> {
    allowed_level_for_lengths(&g.lengths(), epsilon, target)
}

pub fn allowed_level_for_lengths(lengths: &[f64], epsilon: f64, target: f64) -> Result<f64> {
    let eps = resolve_epsilon(lengths, epsilon)?;
    let mut level = target;
    loop {
        let mut moved = false;
        for &l in lengths {
            let n = (level * l / PI).round();
            if (level * l - n * PI).abs() < eps * (1.0 - 1e-12) {
                level = (n * PI + eps) / l;
                moved = true;
            }
        }
        if !moved {
            return Ok(level);
        }
    }
}

/// Whether `level` lies outside all forbidden intervals for margin `eps`.
pub fn is_allowed(lengths: &[f64], eps: f64, level: f64) -> bool {
    lengths.iter().all(|&l| {
        let n = (level * l / PI).round();
        (level * l - n * PI).abs() >= eps * (1.0 - 1e-12)
    })
}

/// Allowed gaps `(lo, hi)` between merged forbidden intervals, up to `upto`.
pub fn allowed_gaps(lengths: &[f64], eps: f64, upto: f64) -> Vec<(f64, f64)> {
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for &l in lengths {
        let top = (upto * l / PI).ceil() as u64 + 1;
        for n in 0..=top {
            let centre = n as f64 * PI;
            intervals.push(((centre - eps) / l, (centre + eps) / l));
        }
    }
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in intervals {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged
        .windows(2)
        .map(|w| (w[0].1, w[1].0))
        .take_while(|&(lo, _)| lo <= upto)
        .collect()
}

/// Margin `epsilon` and ascending allowed levels `N_p`, one per gap between
/// forbidden clusters, ending at the final level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSchedule {
    pub epsilon: f64,
    pub levels: Vec<f64>,
}

impl LevelSchedule {
    pub fn forbidden_interval(&self, length: f64, n: u64) -> (f64, f64) {
        let centre = n as f64 * PI;
        (
            (centre - self.epsilon) / length,
            (centre + self.epsilon) / length,
        )
    }
}

/// Gap midpoints below `final_level`, followed by `final_level` itself
/// (which must be allowed).
pub fn level_schedule(g: &MetricGraph, epsilon: f64, final_level: f64) -> Result<LevelSchedule> {
    let lengths = g.lengths();
    let eps = resolve_epsilon(&lengths, epsilon)?;
    if !is_allowed(&lengths, eps, final_level) {
        let (edge, sine) = worst_sine(&lengths, final_level);
        return Err(Error::ForbiddenRegion {
            k: final_level,
            edge,
            sine,
        });
    }
    let mut levels: Vec<f64> = allowed_gaps(&lengths, eps, final_level)
        .into_iter()
        .filter(|&(_, hi)| hi < final_level)
        .map(|(lo, hi)| 0.5 * (lo + hi))
        .collect();
    levels.push(final_level);
    Ok(LevelSchedule {
        epsilon: eps,
        levels,
    })
}

/// `ForbiddenRegion` unless `level` is allowed for the default margin.
pub fn check_allowed_level(lengths: &[f64], level: f64) -> Result<()> {
    if is_allowed(lengths, default_epsilon(lengths), level) {
        return Ok(());
    }
    let (edge, sine) = worst_sine(lengths, level);
    Err(Error::ForbiddenRegion {
        k: level,
        edge,
        sine,
    })
}

fn worst_sine(lengths: &[f64], k: f64) -> (usize, f64) {
    lengths
        .iter()
        .enumerate()
        .map(|(i, &l)| (i + 1, (k * l).sin().abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, 1.0))
}

/// Ascending eigenvalues with multiplicity expanded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList {
    pub values: Vec<f64>,
    /// `sqrt(lambda)` with `Re k >= 0`, imaginary for negative eigenvalues.
    pub k: Vec<Complex64>,
    /// `|phi(lambda)|` at each root.
    pub residuals: Vec<f64>,
    /// Number of entries in the cluster of coincident roots each value belongs to.
    pub multiplicity: Vec<usize>,
    /// Imaginary part of a final complex Newton correction, a self-adjointness check.
    pub imag_parts: Vec<f64>,
    /// Level `K` the search covered (`sqrt(lambda) < K`).
    pub level: f64,
}

impl EigenvalueList {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of eigenvalues with `sqrt(lambda) < level`.
    pub fn count_below(&self, level: f64) -> usize {
        self.values.iter().filter(|&&v| v < level * level).count()
    }

    pub fn truncated(&self, level: f64) -> Self {
        let n = self.count_below(level);
        let mut out = self.clone();
        out.values.truncate(n);
        out.k.truncate(n);
        out.residuals.truncate(n);
        out.multiplicity.truncate(n);
        out.imag_parts.truncate(n);
        out.level = level;
        out
    }
}

/// Zeros of `phi(k)` inside a closed `k`-plane path.
pub fn count_zeros_box(
    g: &MetricGraph,
    h: &HermitianCoupling,
    path: &ContourPath,
    quad_tol: f64,
) -> Result<usize> {
    count_secular_zeros(
        &SecularFunction::new(g, h, mode_for(g), CONTOUR_TOL),
        path,
        quad_tol,
    )
}

pub(crate) fn mode_for(g: &MetricGraph) -> BasisMode {
    if g.edges.iter().all(|e| e.potential == Potential::Zero) {
        BasisMode::ZeroPotential
    } else {
        BasisMode::Numeric
    }
}

/// Lower bound on the spectrum from the quadratic form: each endpoint value obeys
/// `|f(0)|^2 + |f(l)|^2 <= a ||f'||^2 + (2/a) ||f||^2` for `a <= l/2`, and
/// `a = min(l_min/2, 1/||H||)` absorbs the vertex term into the kinetic one.
pub fn spectrum_lower_bound(g: &MetricGraph, h: &HermitianCoupling) -> f64 {
    let q_min = g
        .edges
        .iter()
        .map(|e| e.potential.lower_bound(e.length))
        .fold(f64::INFINITY, f64::min);
    let l_min = g
        .edges
        .iter()
        .map(|e| e.length)
        .fold(f64::INFINITY, f64::min);
    let norm = h.matrix().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    q_min - (4.0 * norm / l_min).max(2.0 * norm * norm)
}

/// All eigenvalues with `sqrt(lambda) < level`, negative ones included, checked
/// against the Weyl count `d + sum floor(level l_i / pi)`.
pub fn find_eigenvalues(
    g: &MetricGraph,
    h: &HermitianCoupling,
    level: f64,
    tol: f64,
) -> Result<EigenvalueList> {
    let list = find_eigenvalues_unchecked(g, h, level, tol)?;
    let expected = weyl_count(&g.lengths(), level);
    if list.len() != expected {
        return Err(Error::CountMismatch {
            found: list.len(),
            expected,
            level,
        });
    }
    Ok(list)
}

/// [`find_eigenvalues`] without the Weyl cross-check.
pub fn find_eigenvalues_unchecked(
    g: &MetricGraph,
    h: &HermitianCoupling,
    level: f64,
    tol: f64,
) -> Result<EigenvalueList> {
    if !(tol > 0.0 && tol < 1e-3) {
        return Err(Error::BadTolerance(tol));
    }
    let lengths = g.lengths();
    let eps = default_epsilon(&lengths);
    check_allowed_level(&lengths, level)?;
    let gaps: Vec<(f64, f64)> = allowed_gaps(&lengths, eps, level)
        .into_iter()
        .filter(|&(_, hi)| hi < level)
        .collect();
    let mode = mode_for(g);
    let finder = Finder {
        count: SecularFunction::new(g, h, mode, COUNT_TOL),
        refine: SecularFunction::new(g, h, mode, SPECTRUM_TOL),
        tol,
        quad_tol: SEED_QUAD_TOL,
        max_power: 2 * g.edge_count() + 2,
    };

    let mut roots: Vec<Root> = Vec::new();
    // Right boundary of the region already searched, as a wavenumber.
    let mut done = 0.0;
    let floor = spectrum_lower_bound(g, h) - 1.0;
    for (p, &(lo, hi)) in gaps.iter().enumerate() {
        let mut last_err = None;
        let mut advanced = false;
        for frac in [0.5, 0.3, 0.7, 0.15, 0.85] {
            let next = lo + frac * (hi - lo);
            let result = if p == 0 {
                finder.low_region(floor, next)
            } else {
                finder.window(done, next)
            };
            match result {
                Ok(found) => {
                    roots.extend(found);
                    done = next;
                    advanced = true;
                    break;
                }
                Err(e @ Error::BoundaryTooClose { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        if !advanced {
            return Err(last_err.expect("at least one attempt"));
        }
    }
    roots.extend(if gaps.is_empty() {
        finder.low_region(floor, level)?
    } else {
        finder.window(done, level)?
    });

    roots.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let values: Vec<f64> = roots.iter().map(|r| r.lambda).collect();
    let multiplicity = coincidence_counts(&values, tol);
    Ok(EigenvalueList {
        k: values
            .iter()
            .map(|&v| wavenumber(Complex64::new(v, 0.0)))
            .collect(),
        residuals: roots.iter().map(|r| r.residual).collect(),
        imag_parts: roots.iter().map(|r| r.imag).collect(),
        multiplicity,
        values,
        level,
    })
}

fn coincidence_counts(values: &[f64], tol: f64) -> Vec<usize> {
    let close = |a: f64, b: f64| (a - b).abs() <= 10.0 * tol * a.abs().max(1.0);
    let mut out = vec![1; values.len()];
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && close(values[end - 1], values[end]) {
            end += 1;
        }
        for m in &mut out[start..end] {
            *m = end - start;
        }
        start = end;
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Root {
    lambda: f64,
    residual: f64,
    imag: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Plane {
    K,
    Lambda,
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    re0: f64,
    re1: f64,
    im0: f64,
    im1: f64,
}

impl Rect {
    fn path(&self) -> ContourPath {
        ContourPath::rectangle(self.re0, self.re1, self.im0, self.im1)
    }

    fn centre(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    fn radius(&self) -> f64 {
        (0.5 * (self.re1 - self.re0)).max(0.5 * (self.im1 - self.im0))
    }

    fn split(&self, frac: f64) -> (Rect, Rect) {
        let mid = self.re0 + frac * (self.re1 - self.re0);
        (Rect { re1: mid, ..*self }, Rect { re0: mid, ..*self })
    }
}

struct Finder<'a> {
    count: SecularFunction<'a>,
    refine: SecularFunction<'a>,
    tol: f64,
    quad_tol: f64,
    max_power: usize,
}

impl Finder<'_> {
    /// Eigenvalues in `[floor, top^2)` from one box in the `lambda`-plane.
    fn low_region(&self, floor: f64, top: f64) -> Result<Vec<Root>> {
        let hi = top * top;
        if floor >= hi {
            return Ok(Vec::new());
        }
        let half_height = (0.25 * (hi - floor)).clamp(0.5, 20.0);
        let rect = Rect {
            re0: floor,
            re1: hi,
            im0: -half_height,
            im1: half_height,
        };
        let estimates = self.locate(Plane::Lambda, rect, 0)?;
        self.refine_all(estimates, floor, hi)
    }

    /// Eigenvalues with `a < sqrt(lambda) < b` from one box in the `k`-plane.
    fn window(&self, a: f64, b: f64) -> Result<Vec<Root>> {
        let half_height = (0.5 * (b - a)).clamp(0.05, 1.0);
        let rect = Rect {
            re0: a,
            re1: b,
            im0: -half_height,
            im1: half_height,
        };
        let estimates: Vec<f64> = self
            .locate(Plane::K, rect, 0)?
            .into_iter()
            .map(|k| k * k)
            .collect();
        self.refine_all(estimates, a * a, b * b)
    }

    /// Real parts of starting values for all zeros in `rect`, in plane coordinates.
    fn locate(&self, plane: Plane, rect: Rect, depth: usize) -> Result<Vec<f64>> {
        let (centre, radius) = (rect.centre(), rect.radius());
        let corners: Vec<Complex64> = [
            (rect.re0, rect.im0),
            (rect.re0, rect.im1),
            (rect.re1, rect.im0),
            (rect.re1, rect.im1),
        ]
        .iter()
        .map(|&(x, y)| {
            let z = Complex64::new(x, y);
            if plane == Plane::K {
                z * z
            } else {
                z
            }
        })
        .collect();
        let f = self.count.frozen_at(&corners)?;
        let (count, moments) = argument_moments(
            |z| match plane {
                Plane::K => {
                    let (v, d) = f.eval_with_central_derivative(z * z)?;
                    Ok((v, 2.0 * z * d / v))
                }
                Plane::Lambda => {
                    let (v, d) = f.eval_with_central_derivative(z)?;
                    Ok((v, d / v))
                }
            },
            &rect.path(),
            centre,
            radius,
            self.max_power,
            self.quad_tol,
        )?;
        if count == 0 {
            return Ok(Vec::new());
        }
        if count <= self.max_power {
            let roots = power_sum_roots(&moments[1..=count]);
            let inside = roots.iter().all(|w| {
                let z = centre + w * radius;
                z.re > rect.re0 && z.re < rect.re1
            });
            if inside || depth >= 40 {
                return Ok(roots.iter().map(|w| (centre + w * radius).re).collect());
            }
        }
        if depth >= 40 {
            return Err(Error::RootNotConverged(format!(
                "cannot isolate {count} zeros near {centre}"
            )));
        }
        let mut last = None;
        for frac in [0.5, 0.43, 0.57, 0.36, 0.64] {
            let (left, right) = rect.split(frac);
            match self.locate(plane, left, depth + 1).and_then(|mut l| {
                l.extend(self.locate(plane, right, depth + 1)?);
                Ok(l)
            }) {
                Ok(v) => return Ok(v),
                Err(e @ Error::BoundaryTooClose { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one split"))
    }

    fn real_phi(&self, lambda: f64) -> Result<f64> {
        Ok(self.refine.eval(Complex64::new(lambda, 0.0))?.re)
    }

    fn step_tol(&self, lambda: f64) -> f64 {
        self.tol * lambda.abs().max(1.0)
    }

    /// Refines starting values in `(lo, hi)` on the real axis.
    fn refine_all(&self, mut estimates: Vec<f64>, lo: f64, hi: f64) -> Result<Vec<Root>> {
        if estimates.is_empty() {
            return Ok(Vec::new());
        }
        estimates.sort_by(f64::total_cmp);
        for e in estimates.iter_mut() {
            *e = e.clamp(lo, hi);
        }
        let cluster_gap = 1e-3 * (hi - lo);
        let mut groups: Vec<Vec<f64>> = Vec::new();
        for &e in &estimates {
            match groups.last_mut() {
                Some(g) if e - g[g.len() - 1] < cluster_gap => g.push(e),
                _ => groups.push(vec![e]),
            }
        }
        let mut out = Vec::with_capacity(estimates.len());
        for (j, group) in groups.iter().enumerate() {
            let left_room = if j == 0 {
                group[0] - lo
            } else {
                0.5 * (group[0] - groups[j - 1].last().unwrap())
            };
            let right_room = if j + 1 == groups.len() {
                hi - group[group.len() - 1]
            } else {
                0.5 * (groups[j + 1][0] - group[group.len() - 1])
            };
            let pad_l = left_room.min(cluster_gap).max(0.0) * 0.999;
            let pad_r = right_room.min(cluster_gap).max(0.0) * 0.999;
            out.extend(self.refine_group(
                group,
                group[0] - pad_l,
                group[group.len() - 1] + pad_r,
            )?);
        }
        Ok(out)
    }

    fn refine_group(&self, group: &[f64], a: f64, b: f64) -> Result<Vec<Root>> {
        let m = group.len();
        let samples = 4 * m + 1;
        let mut xs = Vec::with_capacity(samples);
        let mut fs = Vec::with_capacity(samples);
        for s in 0..samples {
            let x = a + (b - a) * s as f64 / (samples - 1) as f64;
            xs.push(x);
            fs.push(self.real_phi(x)?);
        }
        let brackets: Vec<usize> = (0..samples - 1)
            .filter(|&s| fs[s] == 0.0 || fs[s] * fs[s + 1] < 0.0)
            .collect();
        if brackets.len() == m {
            return brackets
                .iter()
                .map(|&s| {
                    let lambda = if fs[s] == 0.0 {
                        xs[s]
                    } else {
                        brent(
                            |x| self.real_phi(x),
                            xs[s],
                            xs[s + 1],
                            fs[s],
                            fs[s + 1],
                            |x| self.step_tol(x),
                        )?
                    };
                    self.finish(lambda, 1)
                })
                .collect();
        }
        let start = group.iter().sum::<f64>() / m as f64;
        let lambda = self.modified_newton(start, m, a.min(start), b.max(start))?;
        let root = self.finish(lambda, m)?;
        Ok(vec![root; m])
    }

    /// `lambda -= m phi / phi'`, quadratically convergent at a zero of multiplicity `m`.
    fn modified_newton(&self, start: f64, m: usize, a: f64, b: f64) -> Result<f64> {
        let width = (b - a).max(self.step_tol(start));
        let mut x = start;
        for _ in 0..80 {
            let (v, d) = self.refine.eval_with_derivative(Complex64::new(x, 0.0))?;
            if v.re == 0.0 {
                return Ok(x);
            }
            let step = m as f64 * v.re / d.re;
            if !step.is_finite() {
                break;
            }
            let next = x - step;
            if (next - start).abs() > 4.0 * width {
                break;
            }
            x = next;
            if step.abs() <= self.step_tol(x) {
                return Ok(x);
            }
        }
        Err(Error::RootNotConverged(format!(
            "{m}-fold root near lambda = {start}"
        )))
    }

    fn finish(&self, lambda: f64, m: usize) -> Result<Root> {
        let (v, d) = self
            .refine
            .eval_with_derivative(Complex64::new(lambda, 0.0))?;
        let correction = if v.norm() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            m as f64 * v / d
        };
        Ok(Root {
            lambda,
            residual: v.norm(),
            imag: correction.im,
        })
    }
}

/// Roots of the monic polynomial whose roots have power sums `s_1, ..., s_m`.
fn power_sum_roots(sums: &[Complex64]) -> Vec<Complex64> {
    let m = sums.len();
    // Newton's identities: elementary symmetric polynomials
    let mut e = vec![Complex64::new(1.0, 0.0)];
    for k in 1..=m {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * sums[i - 1];
        }
        e.push(acc / k as f64);
    }
    // p(w) = sum_j (-1)^j e_j w^{m-j}
    let coeffs: Vec<Complex64> = (0..=m)
        .map(|j| if j % 2 == 0 { e[j] } else { -e[j] })
        .collect();
    let eval = |w: Complex64| {
        coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c)
    };
    // Durand–Kerner iteration
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..m).map(|i| seed.powu(i as u32 + 1)).collect();
    for _ in 0..2000 {
        let mut change: f64 = 0.0;
        for i in 0..m {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..m {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-300, 0.0);
            }
            let delta = eval(z[i]) / denom;
            z[i] -= delta;
            change = change.max(delta.norm());
        }
        if change < 1e-15 {
            break;
        }
    }
    z
}

/// Brent's method on a sign-changing bracket.
fn brent<F, T>(mut f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, tol: T) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
    T: Fn(f64) -> f64,
{
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..200 {
        if fb == 0.0 || (b - a).abs() <= tol(b) {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let outside = !((s > lo.min(b)) && (s < lo.max(b)));
        let t = tol(b);
        if outside
            || (bisected && (s - b).abs() >= 0.5 * (b - c).abs())
            || (!bisected && (s - b).abs() >= 0.5 * (c - d).abs())
            || (bisected && (b - c).abs() < t)
            || (!bisected && (c - d).abs() < t)
        {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s)?;
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Err(Error::RootNotConverged(format!(
        "bracket [{a}, {b}] did not shrink"
    )))
}

/// One eigenvalue paired with a `mu` entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    /// Position in the ascending eigenvalue list.
    pub index: usize,
    pub lambda: f64,
    pub mu: f64,
    /// Edge whose subsequence receives the eigenvalue (0-based).
    pub edge: usize,
    /// Position within that subsequence.
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPartition {
    /// `subsequences[i][n]` is `lambda_{in}`.
    pub subsequences: Vec<Vec<f64>>,
    pub pairs: Vec<Pairing>,
    /// The first `d + 1` eigenvalues are all negative, so pairing the first `d`
    /// of them with the zero `mu` entries is questionable.
    pub strained: bool,
}

/// Pairs eigenvalues with `mu` entries in ascending order and splits them by edge.
pub fn partition(
    g: &MetricGraph,
    eigs: &EigenvalueList,
    mu: &MuSequence,
) -> Result<SpectrumPartition> {
    if eigs.len() != mu.len() {
        return Err(Error::LengthMismatch(format!(
            "{} eigenvalues but {} mu entries",
            eigs.len(),
            mu.len()
        )));
    }
    let d = g.edge_count();
    let mut subsequences = vec![Vec::new(); d];
    let mut pairs = Vec::with_capacity(eigs.len());
    let mut leading = 0;
    for (index, (&lambda, entry)) in eigs.values.iter().zip(&mu.entries).enumerate() {
        let edge = match entry.edge {
            Some(i) => i,
            None => {
                leading += 1;
                leading - 1
            }
        };
        let n = subsequences[edge].len();
        subsequences[edge].push(lambda);
        pairs.push(Pairing {
            index,
            lambda,
            mu: entry.value,
            edge,
            n,
        });
    }
    let strained = eigs.len() > d && eigs.values[d] < 0.0;
    Ok(SpectrumPartition {
        subsequences,
        pairs,
        strained,
    })
}
