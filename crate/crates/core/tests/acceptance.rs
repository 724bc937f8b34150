//! Acceptance suite. Runs every criterion in sequence, prints one PASS/FAIL line
//! per criterion and exits nonzero if any failed.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use qgraph::basis::basis_numeric;
use qgraph::contour::{
    product_zero_count, residue_numeric, residue_reference, rouche_verify, ResidueKind,
};
use qgraph::secular::{log_ratio, log_ratio_numeric, phi, BasisMode, LogRatioVariant};
use qgraph::spectrum::{
    allowed_level, find_eigenvalues, mu_sequence, partition, weyl_count, DEFAULT_QUAD_TOL,
};
use qgraph::trace::{
    convergence_report, mu_windows, predict_cluster_sum, predict_eigenvalue, trace_lhs_contour,
    trace_rhs, TraceReport,
};
use qgraph::{CouplingSpec, Edge, HermitianCoupling, MetricGraph, Potential, Result};

use common::*;

const TOL: f64 = 1e-12;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn coupled(g: &MetricGraph) -> HermitianCoupling {
    g.hermitian().expect("instance coupling is admissible")
}

/// First allowed level at or above each target.
fn levels(g: &MetricGraph, targets: &[f64]) -> Result<Vec<f64>> {
    targets.iter().map(|&t| allowed_level(g, 0.0, t)).collect()
}

fn families() -> Vec<(&'static str, MetricGraph)> {
    vec![
        ("d=1 neumann x^2", neumann_square()),
        ("d=1 robin", robin_interval()),
        ("d=2 generic", generic_pair()),
        ("d=3 generic", generic_triple()),
    ]
}

fn criterion_1() -> Result<Outcome> {
    let g = neumann_square();
    let h = coupled(&g);
    let start = Instant::now();
    let lv = levels(&g, &[199.5, 640.0])?;
    let report = convergence_report(&g, &h, &lv, TOL)?;
    let elapsed = start.elapsed().as_secs_f64();
    let rhs_ok = (report.rhs - PI * PI / 12.0).abs() < 1e-14;
    let [short, long] = [report.partial_sums[0], report.partial_sums[1]];
    Ok(Outcome::new(
        rhs_ok && long.error.abs() <= 5e-3 && elapsed <= 60.0,
        format!(
            "rhs {:.7}; {} pairs: S - rhs = {:.3e}; {} pairs: S - rhs = {:.3e}; {elapsed:.1} s",
            report.rhs, short.pairs, short.error, long.pairs, long.error
        ),
    ))
}

fn criterion_2() -> Result<Outcome> {
    let uniform = |coupling: CouplingSpec, lengths: &[f64]| {
        MetricGraph::new(
            lengths
                .iter()
                .map(|&l| Edge::new(l, Potential::Constant(0.75)))
                .collect(),
            coupling,
        )
    };
    let single = uniform(CouplingSpec::Hermitian(diagonal(&[0.3, -0.6])), &[PI]);
    let triple = uniform(
        CouplingSpec::Hermitian(random_hermitian(3, 5, 0.5)),
        &[1.0, 2f64.sqrt(), 3f64.sqrt()],
    );
    let mut worst: f64 = 0.0;
    let mut rhs: f64 = 0.0;
    let mut terms = 0;
    for g in [&single, &triple] {
        let report = convergence_report(g, &coupled(g), &levels(g, &[20.0])?, TOL)?;
        worst = report
            .terms
            .iter()
            .map(|t| t.value.abs())
            .fold(worst, f64::max);
        rhs = rhs.max(trace_rhs(g).abs());
        terms += report.terms.len();
    }

    // Distinct constants on decoupled edges: eigenvalues of different edges may
    // trade places in the ordering, so only the sum up to an allowed level is exact.
    let decoupled = MetricGraph::new(
        vec![
            Edge::new(1.0, Potential::Constant(0.75)),
            Edge::new(2f64.sqrt(), Potential::Constant(-0.5)),
            Edge::new(PI, Potential::Constant(2.0)),
        ],
        CouplingSpec::Hermitian(diagonal(&[0.3, -0.2, 0.0, 0.5, 1.0, 0.0])),
    );
    let report = convergence_report(
        &decoupled,
        &coupled(&decoupled),
        &levels(&decoupled, &[20.0])?,
        TOL,
    )?;
    let largest = report
        .terms
        .iter()
        .map(|t| t.value.abs())
        .fold(0.0, f64::max);
    let sum = report.partial_sums[0].sum.abs();
    rhs = rhs.max(trace_rhs(&decoupled).abs());
    Ok(Outcome::new(
        worst <= 1e-8 && sum <= 1e-8 && rhs <= 1e-14,
        format!(
            "uniform shift: {terms} terms, max |term| {worst:.2e}; decoupled distinct shifts: |sum| {sum:.2e} \
             (max |term| {largest:.2e}, not asserted); max |rhs| {rhs:.1e}"
        ),
    ))
}

fn criterion_3() -> Result<(Outcome, TraceReport)> {
    let g = generic_pair();
    let start = Instant::now();
    let report = convergence_report(
        &g,
        &coupled(&g),
        &levels(&g, &[10.0, 20.0, 40.0, 80.0, 160.0])?,
        TOL,
    )?;
    let errors: Vec<f64> = report.partial_sums.iter().map(|p| p.error.abs()).collect();
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let last = *errors.last().expect("five levels");
    let exponent = report.fit.map_or(f64::NAN, |f| f.exponent);
    let outcome = Outcome::new(
        decreasing && last <= 1e-2 && exponent <= -0.8,
        format!(
            "|S_p - rhs| = {}, fit exponent {exponent:.3}, {:.1} s",
            listed(&errors),
            start.elapsed().as_secs_f64()
        ),
    );
    Ok((outcome, report))
}

fn criterion_4() -> Result<Outcome> {
    let mut checked = Vec::new();
    let mut passed = true;
    for (name, g) in families() {
        let h = coupled(&g);
        let floor = count_floor(&g, &h);
        let lengths = g.lengths();
        let top = allowed_level(&g, 0.0, (floor * 3.0).max(25.0))?;
        let eigs = find_eigenvalues(&g, &h, top, TOL)?;
        let mut n = 0;
        for target in [floor * 1.05, floor * 1.6, floor * 2.2, floor * 3.0] {
            let level = allowed_level(&g, 0.0, target.max(1.0))?;
            let (found, expected) = (eigs.count_below(level), weyl_count(&lengths, level));
            passed &= found == expected;
            n += 1;
            if found != expected {
                checked.push(format!("{name} at {level:.3}: {found} vs {expected}"));
            }
        }
        checked.push(format!("{name}: {n} levels from {floor:.2}"));
    }
    Ok(Outcome::new(passed, checked.join("; ")))
}

fn criterion_5() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &length in &[1.0, PI, 2f64.sqrt()] {
        for kind in ResidueKind::ALL {
            for n in [0, 1, 2, 5] {
                if !kind.accepts(n) {
                    continue;
                }
                let err = (residue_numeric(kind, n, length, TOL)?
                    - residue_reference(kind, n, length)?)
                .norm();
                worst = worst.max(err);
                count += 1;
            }
        }
    }
    Ok(Outcome::new(
        worst <= 1e-8,
        format!("{count} residues, max error {worst:.2e}"),
    ))
}

fn criterion_6() -> Result<Outcome> {
    let free = neumann_free(PI);
    let (phi_zeros, product_zeros) = rouche_verify(&free, &coupled(&free), 10.5, DEFAULT_QUAD_TOL)?;
    let mut passed =
        phi_zeros == 22 && product_zeros == 22 && product_zero_count(&[PI], 10.5) == 22;
    let mut lines = vec![format!(
        "neumann pi at 10.5: {phi_zeros} and {product_zeros}"
    )];
    for (name, g) in families() {
        let h = coupled(&g);
        let floor = count_floor(&g, &h);
        let mut counts = Vec::new();
        for target in [floor * 1.05, floor * 1.6, floor * 2.2] {
            let level = allowed_level(&g, 0.0, target)?;
            let (a, b) = rouche_verify(&g, &h, level, DEFAULT_QUAD_TOL)?;
            passed &= a == b;
            counts.push(format!("{a}/{b}"));
        }
        lines.push(format!("{name}: {}", counts.join(" ")));
    }
    Ok(Outcome::new(passed, lines.join("; ")))
}

fn criterion_7() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for (name, g) in families() {
        let h = coupled(&g);
        let floor = count_floor(&g, &h);
        let targets = [floor * 1.05, floor * 1.6, floor * 2.2];
        let g0 = g.without_potential();
        for level in levels(&g, &targets)? {
            let below = |list: &qgraph::spectrum::EigenvalueList| -> f64 {
                list.values.iter().filter(|&&v| v < level * level).sum()
            };
            let direct = below(&find_eigenvalues(&g, &h, level, TOL)?)
                - below(&find_eigenvalues(&g0, &h, level, TOL)?);
            let contour = trace_lhs_contour(&g, &h, level)?;
            worst = worst.max((contour - direct).abs());
        }
        lines.push(format!("{name} at {} levels", targets.len()));
    }
    lines.push(format!("max |contour - direct| {worst:.2e}"));
    Ok(Outcome::new(worst <= 1e-6, lines.join("; ")))
}

/// Ratio of the largest value over `n > split` to the largest over `n <= split`.
fn growth(samples: &[(u64, f64)], split: u64) -> f64 {
    let max = |keep: &dyn Fn(u64) -> bool| {
        samples
            .iter()
            .filter(|s| keep(s.0))
            .map(|s| s.1)
            .fold(0.0, f64::max)
    };
    max(&|n| n > split) / max(&|n| n <= split)
}

fn criterion_8(generic: &TraceReport) -> Result<Outcome> {
    const GROWTH_LIMIT: f64 = 2.0;
    let robin = robin_interval();
    let h = coupled(&robin);
    let level = allowed_level(&robin, 0.0, 50.5 * PI / 2.0)?;
    let part = partition(
        &robin,
        &find_eigenvalues(&robin, &h, level, TOL)?,
        &mu_sequence(&robin, level),
    )?;
    let mut robin_samples = Vec::new();
    for n in 5..=50u64 {
        let p = predict_eigenvalue(&robin, &h, 0, n)?;
        robin_samples.push((
            n,
            (n * n) as f64 * (part.subsequences[0][n as usize] - p.value).abs(),
        ));
    }
    let robin_growth = growth(&robin_samples, 25);
    let robin_max = robin_samples.iter().map(|s| s.1).fold(0.0, f64::max);

    let g = generic_pair();
    let h = coupled(&g);
    let lengths = g.lengths();
    let mut raw_max: f64 = 0.0;
    let mut scaled = Vec::new();
    for t in generic.terms.iter().filter(|t| (5..=50).contains(&t.n)) {
        let p = predict_eigenvalue(&g, &h, t.edge, t.n as u64)?;
        let n = t.n as f64;
        let sine = (n * PI * lengths[1 - t.edge] / lengths[t.edge]).sin();
        let raw = n * n * (t.lambda_q - p.value).abs();
        raw_max = raw_max.max(raw);
        scaled.push((t.n as u64, raw * sine * sine));
    }
    let generic_growth = growth(&scaled, 25);

    let comm = commensurate_pair();
    let h = coupled(&comm);
    let level = allowed_level(&comm, 0.0, 50.5)?;
    let part = partition(
        &comm,
        &find_eigenvalues(&comm, &h, level, TOL)?,
        &mu_sequence(&comm, level),
    )?;
    let mut clusters = Vec::new();
    for members in mu_windows(&comm, level)?.iter().filter(|m| m.len() == 2) {
        let n_min = members.iter().map(|m| m.1).min().expect("two members");
        if n_min < 3 {
            continue;
        }
        let predicted = predict_cluster_sum(&comm, &h, members)?.value;
        let computed: f64 = members
            .iter()
            .map(|&(i, n)| part.subsequences[i][n as usize])
            .sum();
        clusters.push((
            members[0].1.max(members[1].1),
            (n_min * n_min) as f64 * (computed - predicted).abs(),
        ));
    }
    let cluster_growth = growth(&clusters, 25);
    let cluster_max = clusters.iter().map(|s| s.1).fold(0.0, f64::max);

    Ok(Outcome::new(
        robin_growth <= GROWTH_LIMIT && generic_growth <= GROWTH_LIMIT && cluster_growth <= GROWTH_LIMIT,
        format!(
            "robin n^2|err| max {robin_max:.3} growth {robin_growth:.2}; generic n^2|err| max {raw_max:.2}, \
             sine-scaled growth {generic_growth:.2}; {} clusters n^2|err| max {cluster_max:.3} growth {cluster_growth:.2}",
            clusters.len()
        ),
    ))
}

/// `k^2 |numeric - expansion|` of `ln(phi / prod(-k sin k l_i))` at the allowed levels near 20, 40, 80, 160.
fn expansion_defects(g: &MetricGraph) -> Result<Vec<f64>> {
    let h = coupled(g);
    let mut scaled = Vec::new();
    for level in levels(g, &[20.0, 40.0, 80.0, 160.0])? {
        let k = Complex64::new(level, 0.0);
        let expansion = log_ratio(g, &h, k, LogRatioVariant::VsProduct)?.value;
        let numeric = log_ratio_numeric(g, &h, k, LogRatioVariant::VsProduct, Some(expansion))?;
        scaled.push(level * level * (numeric - expansion).norm());
    }
    Ok(scaled)
}

fn listed(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", items.join(", "))
}

fn criterion_9() -> Result<Outcome> {
    // With every l_i a rational multiple of pi the sampled levels share the phases
    // k l_i mod pi, so the oscillating remainder factor is the same at each level.
    let mut passed = true;
    let mut lines = Vec::new();
    for (name, g) in [
        ("d=1 neumann x^2", neumann_square()),
        ("d=1 robin pi", robin_pi()),
        ("d=2 (pi, pi/2)", commensurate_pair()),
    ] {
        let scaled = expansion_defects(&g)?;
        passed &= scaled.windows(2).all(|w| w[1] <= w[0]);
        lines.push(format!("{name}: {}", listed(&scaled)));
    }
    for (name, g) in [
        ("d=1 robin l=2", robin_interval()),
        ("d=2 generic", generic_pair()),
    ] {
        lines.push(format!(
            "{name} (unlocked phases, not asserted): {}",
            listed(&expansion_defects(&g)?)
        ));
    }
    Ok(Outcome::new(passed, lines.join("; ")))
}

fn criterion_10() -> Result<Outcome> {
    let samples = [
        Complex64::new(3.7, 0.0),
        Complex64::new(-2.0, 0.5),
        Complex64::new(150.0, -20.0),
        Complex64::new(40.0, 12.0),
        Complex64::new(1.0e4, 0.0),
    ];
    let mut wronskian: f64 = 0.0;
    let mut symmetry: f64 = 0.0;
    let mut hermitian: f64 = 0.0;
    let mut pairing_stable = true;
    for (_, g) in families() {
        let h = coupled(&g);
        hermitian = hermitian.max((h.matrix() - h.matrix().adjoint()).camax());
        for e in &g.edges {
            for &lambda in &samples {
                wronskian =
                    wronskian.max((basis_numeric(e, lambda, TOL)?.wronskian() - 1.0).norm());
            }
        }
        for &lambda in &samples {
            let value = phi(&g, &h, lambda, BasisMode::Numeric)?.value;
            let mirror = phi(&g, &h, lambda.conj(), BasisMode::Numeric)?.value;
            symmetry = symmetry.max((mirror - value.conj()).norm() / value.norm().max(1.0));
        }
        let lv = levels(&g, &[8.0, 16.0])?;
        let short = partition(
            &g,
            &find_eigenvalues(&g, &h, lv[0], TOL)?,
            &mu_sequence(&g, lv[0]),
        )?;
        let long = partition(
            &g,
            &find_eigenvalues(&g, &h, lv[1], TOL)?,
            &mu_sequence(&g, lv[1]),
        )?;
        pairing_stable &= short.pairs.iter().zip(&long.pairs).all(|(a, b)| {
            a.edge == b.edge
                && a.n == b.n
                && a.mu == b.mu
                && (a.lambda - b.lambda).abs() <= 1e-9 * a.lambda.abs().max(1.0)
        });
    }
    Ok(Outcome::new(
        wronskian <= 1e-9 && hermitian == 0.0 && symmetry <= 1e-10 && pairing_stable,
        format!(
            "wronskian defect {wronskian:.1e}, hermitian defect {hermitian:.1e}, conjugate symmetry {symmetry:.1e}, \
             pairing stable {pairing_stable}; property suites run under cargo test"
        ),
    ))
}

fn report(id: usize, result: Result<Outcome>) -> bool {
    let (passed, detail) = match result {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    println!(
        "criterion {id:>2}: {} {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    passed
}

fn main() -> ExitCode {
    let mut passed = Vec::new();
    passed.push(report(1, criterion_1()));
    passed.push(report(2, criterion_2()));
    let generic = match criterion_3() {
        Ok((outcome, r)) => {
            passed.push(report(3, Ok(outcome)));
            Some(r)
        }
        Err(e) => {
            passed.push(report(3, Err(e)));
            None
        }
    };
    passed.push(report(4, criterion_4()));
    passed.push(report(5, criterion_5()));
    passed.push(report(6, criterion_6()));
    passed.push(report(7, criterion_7()));
    passed.push(match &generic {
        Some(r) => report(8, criterion_8(r)),
        None => report(8, Ok(Outcome::new(false, "needs the criterion 3 report"))),
    });
    passed.push(report(9, criterion_9()));
    passed.push(report(10, criterion_10()));
    let failed = passed.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        passed.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
