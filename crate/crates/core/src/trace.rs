//! Both sides of the regularized trace formula, the per-window eigenvalue
//! asymptotics, and convergence diagnostics for truncated trace sums.
//!
//! The left-hand side is available two ways: from paired eigenvalues
//! ([`trace_lhs_partial`]) and from the contour integral of `ln(phi / phi_0)`
//! over the square `+-N +- iN` ([`trace_lhs_contour`]).

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{integrate_contour, k_plane_references, ContourPath, MAX_GROWTH_EXPONENT};
use crate::error::{Error, Result};
use crate::graph::{
    block_entries, potential_moments, BlockEntries, HermitianCoupling, MetricGraph,
};
use crate::io::format_number;
use crate::secular::{nearest_branch, BasisMode, SecularFunction, SPECTRUM_TOL};
use crate::spectrum::{
    check_allowed_level, find_eigenvalues, level_schedule, mode_for, mu_sequence, partition,
    SpectrumPartition,
};

/// Absolute accuracy targeted by [`trace_lhs_contour`].
pub const CONTOUR_SUM_TOL: f64 = 1e-8;
/// Errors `|S_p - rhs|` below this are solver noise and stay out of the tail fit.
pub const NOISE_FLOOR: f64 = 1e-9;
/// Predictions with some `|sin(n pi l_j / l_i)|` below this are low-confidence.
pub const SMALL_SINE: f64 = 1e-3;

/// `sum_i [(q_i(l_i) + q_i(0)) / 4 - (1 / 2 l_i) int q_i]`
pub fn trace_rhs(g: &MetricGraph) -> f64 {
    g.edges
        .iter()
        .map(|e| {
            let m = potential_moments(e);
            m.endpoint_quarter() - m.a / e.length
        })
        .sum()
}

/// One regularized term `lambda_in(q) - lambda_in(0) - (1 / l_i) int q_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceTerm {
    /// 0-based edge index.
    pub edge: usize,
    pub n: usize,
    pub mu: f64,
    pub lambda_q: f64,
    pub lambda_0: f64,
    pub value: f64,
}

/// Regularized terms of two partitions built on the same `mu`-sequence.
pub fn regularized_terms(
    part_q: &SpectrumPartition,
    part_0: &SpectrumPartition,
    g: &MetricGraph,
) -> Result<Vec<TraceTerm>> {
    let d = g.edge_count();
    let lengths_q: Vec<usize> = part_q.subsequences.iter().map(Vec::len).collect();
    let lengths_0: Vec<usize> = part_0.subsequences.iter().map(Vec::len).collect();
    if lengths_q.len() != d || lengths_q != lengths_0 {
        return Err(Error::LengthMismatch(format!(
            "subsequence lengths {lengths_q:?} vs {lengths_0:?} on {d} edges"
        )));
    }
    let shifts: Vec<f64> = g
        .edges
        .iter()
        .map(|e| e.potential.integral(e.length) / e.length)
        .collect();
    part_q
        .pairs
        .iter()
        .zip(&part_0.pairs)
        .map(|(pq, p0)| {
            if pq.edge != p0.edge || pq.n != p0.n {
                return Err(Error::LengthMismatch(format!(
                    "pair {} is ({}, {}) for q but ({}, {}) for q = 0",
                    pq.index, pq.edge, pq.n, p0.edge, p0.n
                )));
            }
            Ok(TraceTerm {
                edge: pq.edge,
                n: pq.n,
                mu: pq.mu,
                lambda_q: pq.lambda,
                lambda_0: p0.lambda,
                value: pq.lambda - p0.lambda - shifts[pq.edge],
            })
        })
        .collect()
}

/// Sum of the regularized terms whose `mu` lies below `level`.
pub fn trace_lhs_partial(
    part_q: &SpectrumPartition,
    part_0: &SpectrumPartition,
    g: &MetricGraph,
    level: f64,
) -> Result<f64> {
    Ok(regularized_terms(part_q, part_0, g)?
        .iter()
        .filter(|t| t.mu < level)
        .map(|t| t.value)
        .sum())
}

/// `sum [lambda(q) - lambda(0)]` over the eigenvalues with `|k| < level`, from
/// `-(1 / 4 pi i) int ln(phi / phi_0) 2k dk` around the square `+-level +- i level`.
///
/// The integrand is odd in `k`, so only the right and top sides are integrated.
/// The logarithm is continued along them from a presampled sweep.
pub fn trace_lhs_contour(g: &MetricGraph, h: &HermitianCoupling, level: f64) -> Result<f64> {
    let lengths = g.lengths();
    check_allowed_level(&lengths, level)?;
    if level * lengths.iter().sum::<f64>() > MAX_GROWTH_EXPONENT {
        return Err(Error::LevelTooLarge(level));
    }
    if mode_for(g) == BasisMode::ZeroPotential {
        return Ok(0.0);
    }
    let square = ContourPath::square(level);
    let f = SecularFunction::new(g, h, BasisMode::Numeric, SPECTRUM_TOL)
        .frozen_at(&k_plane_references(&square))?;
    let f0 = SecularFunction::new(g, h, BasisMode::ZeroPotential, SPECTRUM_TOL);
    let log_ratio = |k: Complex64| -> Result<Complex64> {
        let lambda = k * k;
        Ok((f.eval(lambda)? / f0.eval(lambda)?).ln())
    };
    let corner = Complex64::new(level, level);
    let vertices = [corner.conj(), corner, Complex64::new(-level, level)];
    let track = BranchTrack::sweep(&log_ratio, &vertices)?;
    let half = ContourPath::polygon(&vertices, false);
    let integral = integrate_contour(
        |k| Ok(track.continued(k, log_ratio(k)?) * 2.0 * k),
        &half,
        2.0 * PI * CONTOUR_SUM_TOL,
    )?;
    Ok((-integral / Complex64::new(0.0, 2.0 * PI)).re)
}

/// Samples of a continuously continued logarithm along a polygon.
struct BranchTrack {
    samples: Vec<(Complex64, f64)>,
}

impl BranchTrack {
    const START: usize = 32;
    const MAX_STEP: f64 = 0.25;

    fn sweep<F>(log: &F, vertices: &[Complex64]) -> Result<Self>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        let first = log(vertices[0])?;
        let mut samples = vec![(vertices[0], first.im)];
        for w in vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            // stack of parameter intervals still to walk, nearest last
            let mut pending: Vec<(f64, f64)> = (0..Self::START)
                .rev()
                .map(|p| {
                    (
                        p as f64 / Self::START as f64,
                        (p + 1) as f64 / Self::START as f64,
                    )
                })
                .collect();
            while let Some((t0, t1)) = pending.pop() {
                let z = a + (b - a) * t1;
                let prev = samples.last().expect("sweep starts with one sample").1;
                let value = nearest_branch(log(z)?, prev);
                if (value.im - prev).abs() > Self::MAX_STEP && t1 - t0 > 1e-9 {
                    let mid = 0.5 * (t0 + t1);
                    pending.push((mid, t1));
                    pending.push((t0, mid));
                    continue;
                }
                samples.push((z, value.im));
            }
        }
        Ok(Self { samples })
    }

    fn continued(&self, z: Complex64, log: Complex64) -> Complex64 {
        let nearest = self
            .samples
            .iter()
            .min_by(|a, b| (a.0 - z).norm_sqr().total_cmp(&(b.0 - z).norm_sqr()))
            .expect("sweep has samples");
        nearest_branch(log, nearest.1)
    }
}

/// One point of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialSum {
    pub level: f64,
    /// Number of eigenvalue pairs summed.
    pub pairs: usize,
    pub sum: f64,
    /// `sum - rhs`
    pub error: f64,
}

/// Least-squares fit `|S_p - rhs| ~ prefactor * N_p^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Levels that entered the fit.
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub rhs: f64,
    pub partial_sums: Vec<PartialSum>,
    pub terms: Vec<TraceTerm>,
    /// `None` when fewer than two errors lie above the noise floor.
    pub fit: Option<TailFit>,
    /// Smallest `C` with `|S_p - rhs| <= C / N_p` at every level.
    pub tail_constant: f64,
    /// Levels where the error grew and exceeds twice the fitted value.
    pub irregular_levels: Vec<f64>,
}

impl TraceReport {
    /// Columns `edge,n,lambda_q,lambda_0,term`; edges are 1-based.
    pub fn terms_csv(&self) -> String {
        let mut out = String::from("edge,n,lambda_q,lambda_0,term\n");
        for t in &self.terms {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                t.edge + 1,
                t.n,
                format_number(t.lambda_q),
                format_number(t.lambda_0),
                format_number(t.value)
            );
        }
        out
    }

    /// `rhs`, partial sums, tail fit and flags as pretty-printed JSON.
    pub fn summary_json(&self) -> String {
        let summary = serde_json::json!({
            "rhs": self.rhs,
            "partial_sums": self.partial_sums,
            "fit": self.fit,
            "tail_constant": self.tail_constant,
            "irregular_levels": self.irregular_levels,
        });
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    }
}

/// Trace sums at each of the increasing allowed `levels`, from one solve at the
/// last level for `q` and one for `q = 0`.
pub fn convergence_report(
    g: &MetricGraph,
    h: &HermitianCoupling,
    levels: &[f64],
    tol: f64,
) -> Result<TraceReport> {
    let lengths = g.lengths();
    if levels.is_empty() || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidLevels(format!(
            "{levels:?} is not a nonempty increasing sequence"
        )));
    }
    for &level in levels {
        check_allowed_level(&lengths, level)?;
    }
    let top = *levels.last().expect("nonempty levels");
    let g0 = g.without_potential();
    let mu = mu_sequence(g, top);
    let part_q = partition(g, &find_eigenvalues(g, h, top, tol)?, &mu)?;
    let part_0 = partition(&g0, &find_eigenvalues(&g0, h, top, tol)?, &mu)?;
    let terms = regularized_terms(&part_q, &part_0, g)?;
    let rhs = trace_rhs(g);
    let partial_sums: Vec<PartialSum> = levels
        .iter()
        .map(|&level| {
            let below = terms.iter().filter(|t| t.mu < level);
            let (pairs, sum) = below.fold((0, 0.0), |(c, s), t| (c + 1, s + t.value));
            PartialSum {
                level,
                pairs,
                sum,
                error: sum - rhs,
            }
        })
        .collect();
    let fit = tail_fit(&partial_sums);
    let tail_constant = partial_sums
        .iter()
        .map(|p| p.error.abs() * p.level)
        .fold(0.0, f64::max);
    let irregular_levels = match fit {
        Some(fit) => partial_sums
            .windows(2)
            .filter(|w| {
                let e = w[1].error.abs();
                e > w[0].error.abs() && e > 2.0 * fit.prefactor * w[1].level.powf(fit.exponent)
            })
            .map(|w| w[1].level)
            .collect(),
        None => Vec::new(),
    };
    Ok(TraceReport {
        rhs,
        partial_sums,
        terms,
        fit,
        tail_constant,
        irregular_levels,
    })
}

/// Fit of `ln|error|` against `ln level` over the errors above [`NOISE_FLOOR`].
pub fn tail_fit(sums: &[PartialSum]) -> Option<TailFit> {
    let pts: Vec<(f64, f64)> = sums
        .iter()
        .filter(|p| p.error.abs() > NOISE_FLOOR)
        .map(|p| (p.level.ln(), p.error.abs().ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let exponent = sxy / sxx;
    Some(TailFit {
        exponent,
        prefactor: (my - exponent * mx).exp(),
        points: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictionOrder {
    /// One eigenvalue in the window.
    Single,
    /// Sum over the eigenvalues of one window.
    Cluster,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    /// `(edge, n)` with 0-based edges.
    pub cluster: Vec<(usize, u64)>,
    pub value: f64,
    pub order: PredictionOrder,
    /// Pairs `(i, j)` left out of the cross sum because `n_i l_j = n_j l_i`.
    pub dropped: Vec<(usize, usize)>,
    pub low_confidence: bool,
}

/// Asymptotic `lambda_in` up to `O(1/n^2)`, for a window holding one eigenvalue.
pub fn predict_eigenvalue(
    g: &MetricGraph,
    h: &HermitianCoupling,
    i: usize,
    n: u64,
) -> Result<AsymptoticPrediction> {
    let blocks = block_entries(h);
    let m = member(g, &blocks, i, n, false)?;
    Ok(AsymptoticPrediction {
        cluster: vec![(i, n)],
        value: m.value,
        order: PredictionOrder::Single,
        dropped: Vec::new(),
        low_confidence: m.min_sine < SMALL_SINE,
    })
}

/// Asymptotic `sum lambda_{i n_i}` over a window, with commensurate cross terms dropped.
pub fn predict_cluster_sum(
    g: &MetricGraph,
    h: &HermitianCoupling,
    cluster: &[(usize, u64)],
) -> Result<AsymptoticPrediction> {
    let blocks = block_entries(h);
    let mut value = 0.0;
    let mut min_sine = f64::INFINITY;
    let mut dropped = Vec::new();
    for &(i, n) in cluster {
        let m = member(g, &blocks, i, n, true)?;
        value += m.value;
        min_sine = min_sine.min(m.min_sine);
        dropped.extend(m.dropped.into_iter().map(|j| (i, j)));
    }
    Ok(AsymptoticPrediction {
        cluster: cluster.to_vec(),
        value,
        order: if cluster.len() == 1 {
            PredictionOrder::Single
        } else {
            PredictionOrder::Cluster
        },
        dropped,
        low_confidence: min_sine < SMALL_SINE,
    })
}

/// Nonzero `mu` entries grouped by the windows between consecutive levels of
/// the default schedule up to `final_level`, as `(edge, n)` with `mu = n pi / l_edge`.
pub fn mu_windows(g: &MetricGraph, final_level: f64) -> Result<Vec<Vec<(usize, u64)>>> {
    let schedule = level_schedule(g, 0.0, final_level)?;
    let lengths = g.lengths();
    let mu = mu_sequence(g, final_level);
    let mut windows = vec![Vec::new(); schedule.levels.len()];
    for entry in &mu.entries {
        if let Some(edge) = entry.edge {
            let p = schedule.levels.partition_point(|&n| n < entry.value);
            windows[p].push((edge, (entry.value * lengths[edge] / PI).round() as u64));
        }
    }
    Ok(windows.into_iter().filter(|w| !w.is_empty()).collect())
}

struct Member {
    value: f64,
    min_sine: f64,
    dropped: Vec<usize>,
}

fn commensurate(n: u64, li: f64, lj: f64) -> bool {
    let x = n as f64 * lj / li;
    (x - x.round()).abs() <= 1e-9 * x.max(1.0)
}

fn member(
    g: &MetricGraph,
    blocks: &BlockEntries,
    i: usize,
    n: u64,
    drop_resonant: bool,
) -> Result<Member> {
    let d = g.edge_count();
    if i >= d {
        return Err(Error::SizeMismatch(format!(
            "edge {} on a graph with {d} edges",
            i + 1
        )));
    }
    if n == 0 {
        return Err(Error::ZeroWavenumber);
    }
    let lengths = g.lengths();
    let li = lengths[i];
    let nf = n as f64;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let a = potential_moments(&g.edges[i]).a;
    let blk = blocks.edges[i];
    let mut value = (nf * PI / li).powi(2) + 2.0 / li * (a - blk.trace() - sign * 2.0 * blk.h12.re);
    let mut cross = 0.0;
    let mut min_sine = f64::INFINITY;
    let mut dropped = Vec::new();
    for (j, &lj) in lengths.iter().enumerate() {
        if j == i {
            continue;
        }
        if commensurate(n, li, lj) {
            if drop_resonant {
                dropped.push(j);
                continue;
            }
            return Err(Error::CommensurateResonance {
                edge: i + 1,
                other: j + 1,
                n,
            });
        }
        let (s, c) = (nf * PI * lj / li).sin_cos();
        let cot = c / s;
        min_sine = min_sine.min(s.abs());
        let x = blocks.cross(i, j);
        cross += cot * x.norm_sqr_sum()
            + x.mix_start() / s
            + sign * x.mix_both() / s
            + sign * cot * x.mix_end();
    }
    value += 2.0 / (nf * PI) * cross;
    Ok(Member {
        value,
        min_sine,
        dropped,
    })
}
