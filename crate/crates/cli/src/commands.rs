use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use num_complex::Complex64;
use serde_json::{json, Value};

use qgraph::basis::wavenumber;
use qgraph::contour::{
    residue_numeric, residue_reference, rouche_threshold, rouche_verify, ResidueKind,
    MAX_GROWTH_EXPONENT,
};
use qgraph::graph::Diagnostic;
use qgraph::io::{format_number, parse_graph_spec, SpecError};
use qgraph::secular::{log_ratio, log_ratio_numeric, LogRatioVariant};
use qgraph::spectrum::{
    allowed_level, find_eigenvalues, find_eigenvalues_unchecked, level_schedule, mu_sequence,
    partition, spectrum_lower_bound, weyl_count, DEFAULT_QUAD_TOL,
};
use qgraph::trace::{convergence_report, mu_windows, predict_cluster_sum};
use qgraph::{Error, HermitianCoupling, MetricGraph};

use crate::{svg, Failure, RunArgs};

const FORMATS: [&str; 3] = ["csv", "json", "svg"];
/// Levels needed for a meaningful trace convergence study.
const MIN_TRACE_LEVELS: usize = 5;
const RESIDUE_TOL: f64 = 1e-8;
const RESIDUE_INDICES: [i64; 4] = [0, 1, 2, 5];
const DECAY_TARGETS: [f64; 4] = [20.0, 40.0, 80.0, 160.0];
const MAX_ROUCHE_LEVELS: usize = 5;

fn solver_failure(e: Error) -> Failure {
    let code = match e {
        Error::BadTolerance(_)
        | Error::EpsilonTooLarge { .. }
        | Error::ForbiddenRegion { .. }
        | Error::InvalidGraph(_)
        | Error::InvalidLevels(_)
        | Error::LevelTooLarge(_)
        | Error::SizeMismatch(_)
        | Error::OverlappingEndpoints(_)
        | Error::NonUnitaryBlock(..)
        | Error::NonUnitary(_)
        | Error::NonHermitianInput(_) => 2,
        _ => 3,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn spec_failure(e: SpecError) -> Failure {
    if let SpecError::Invalid(diagnostics) = &e {
        for d in diagnostics {
            if let Diagnostic::Coupling(inner @ Error::MinusOneInSpectrum { .. }) = d {
                return Failure {
                    code: 3,
                    message: inner.to_string(),
                };
            }
        }
    }
    Failure::input(e.to_string())
}

/// Validated configuration plus the parsed graph.
pub struct Run {
    graph: MetricGraph,
    h: HermitianCoupling,
    /// First allowed level at or above `kmax`.
    level: f64,
    /// 0 selects the default margin.
    epsilon: f64,
    tol: f64,
    out: PathBuf,
    formats: BTreeSet<String>,
}

impl Run {
    pub fn new(args: &RunArgs) -> Result<Self, Failure> {
        if !(args.tol > 1e-14 && args.tol < 1e-3) {
            return Err(Failure::input(format!(
                "--tol {} is outside (1e-14, 1e-3)",
                args.tol
            )));
        }
        if !(args.kmax > 0.0 && args.kmax.is_finite()) {
            return Err(Failure::input(format!(
                "--kmax {} must be positive",
                args.kmax
            )));
        }
        let epsilon = match args.epsilon.as_str() {
            "auto" => 0.0,
            text => match text.parse::<f64>() {
                Ok(v) if v > 0.0 => v,
                _ => {
                    return Err(Failure::input(format!(
                        "--epsilon expects a positive number or auto, got `{text}`"
                    )))
                }
            },
        };
        let mut formats = BTreeSet::new();
        for f in &args.format {
            let f = f.trim().to_ascii_lowercase();
            if !FORMATS.contains(&f.as_str()) {
                return Err(Failure::input(format!(
                    "--format: unknown format `{f}` (expected csv, json, svg)"
                )));
            }
            formats.insert(f);
        }
        let text = fs::read_to_string(&args.graph)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", args.graph.display())))?;
        let graph = parse_graph_spec(&text).map_err(spec_failure)?;
        let h = graph.hermitian().map_err(solver_failure)?;
        let level = allowed_level(&graph, epsilon, args.kmax).map_err(solver_failure)?;
        fs::create_dir_all(&args.out)
            .map_err(|e| Failure::input(format!("cannot create {}: {e}", args.out.display())))?;
        Ok(Self {
            graph,
            h,
            level,
            epsilon,
            tol: args.tol,
            out: args.out.clone(),
            formats,
        })
    }

    fn wants(&self, format: &str) -> bool {
        self.formats.contains(format)
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), Failure> {
        let path = self.out.join(name);
        fs::write(&path, contents)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
    }

    fn write_json(&self, name: &str, value: &Value) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value).expect("report serializes");
        text.push('\n');
        self.write(name, &text)
    }

    pub fn spectrum(&self) -> Result<(), Failure> {
        let g = &self.graph;
        let eigs = find_eigenvalues(g, &self.h, self.level, self.tol).map_err(solver_failure)?;
        let part = partition(g, &eigs, &mu_sequence(g, self.level)).map_err(solver_failure)?;
        if self.wants("csv") {
            let mut csv =
                String::from("index,lambda,k_re,k_im,multiplicity,edge_subsequence,n_within\n");
            for (p, &mult) in part.pairs.iter().zip(&eigs.multiplicity) {
                let k = wavenumber(Complex64::new(p.lambda, 0.0));
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    p.index,
                    format_number(p.lambda),
                    format_number(k.re),
                    format_number(k.im),
                    mult,
                    p.edge + 1,
                    p.n
                );
            }
            self.write("eigenvalues.csv", &csv)?;
        }
        if self.wants("json") {
            let pairs: Vec<Value> = part
                .pairs
                .iter()
                .map(|p| json!({"index": p.index, "lambda": p.lambda, "mu": p.mu, "edge": p.edge + 1, "n": p.n}))
                .collect();
            self.write_json(
                "partition.json",
                &json!({
                    "level": self.level,
                    "strained": part.strained,
                    "subsequences": part.subsequences,
                    "pairs": pairs,
                }),
            )?;
        }
        println!(
            "{} eigenvalues with sqrt(lambda) < {}",
            eigs.len(),
            self.level
        );
        Ok(())
    }

    pub fn trace(&self) -> Result<(), Failure> {
        let schedule =
            level_schedule(&self.graph, self.epsilon, self.level).map_err(solver_failure)?;
        if schedule.levels.len() < MIN_TRACE_LEVELS {
            return Err(Failure::input(format!(
                "--kmax {} gives {} allowed levels; the trace study needs at least {MIN_TRACE_LEVELS}",
                self.level,
                schedule.levels.len()
            )));
        }
        let report = convergence_report(&self.graph, &self.h, &schedule.levels, self.tol)
            .map_err(solver_failure)?;
        if self.wants("csv") {
            self.write("trace_terms.csv", &report.terms_csv())?;
        }
        if self.wants("json") {
            let mut text = report.summary_json();
            text.push('\n');
            self.write("trace_summary.json", &text)?;
        }
        if self.wants("svg") {
            self.write("convergence.svg", &svg::convergence_plot(&report))?;
        }
        let last = report.partial_sums.last().expect("at least one level");
        println!(
            "rhs {} partial sum {} at level {} (difference {:.3e})",
            report.rhs, last.sum, last.level, last.error
        );
        Ok(())
    }

    pub fn asymptotics(&self) -> Result<(), Failure> {
        let g = &self.graph;
        let eigs = find_eigenvalues(g, &self.h, self.level, self.tol).map_err(solver_failure)?;
        let part = partition(g, &eigs, &mu_sequence(g, self.level)).map_err(solver_failure)?;
        let mut rows = Vec::new();
        for (w, members) in mu_windows(g, self.level)
            .map_err(solver_failure)?
            .iter()
            .enumerate()
        {
            let prediction = predict_cluster_sum(g, &self.h, members).map_err(solver_failure)?;
            let computed: f64 = members
                .iter()
                .map(|&(i, n)| part.subsequences[i][n as usize])
                .sum();
            let n_min = members.iter().map(|m| m.1).min().unwrap_or(1) as f64;
            let difference = computed - prediction.value;
            rows.push(json!({
                "window": w,
                "members": members.iter().map(|&(i, n)| json!({"edge": i + 1, "n": n})).collect::<Vec<_>>(),
                "predicted": prediction.value,
                "computed": computed,
                "difference": difference,
                "scaled_difference": difference * n_min * n_min,
                "order": prediction.order,
                "dropped": prediction.dropped.iter().map(|&(i, j)| [i + 1, j + 1]).collect::<Vec<_>>(),
                "low_confidence": prediction.low_confidence,
            }));
        }
        if self.wants("csv") {
            let mut csv = String::from("window,members,predicted,computed,difference,scaled_difference,order,low_confidence\n");
            for r in &rows {
                let members: Vec<String> = r["members"]
                    .as_array()
                    .expect("members array")
                    .iter()
                    .map(|m| format!("{}:{}", m["edge"], m["n"]))
                    .collect();
                let num = |key: &str| format_number(r[key].as_f64().expect("numeric field"));
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{}",
                    r["window"],
                    members.join(" "),
                    num("predicted"),
                    num("computed"),
                    num("difference"),
                    num("scaled_difference"),
                    r["order"].as_str().expect("order string"),
                    r["low_confidence"]
                );
            }
            self.write("asymptotics.csv", &csv)?;
        }
        if self.wants("json") {
            self.write_json(
                "asymptotics.json",
                &json!({"level": self.level, "windows": rows}),
            )?;
        }
        println!("{} windows below level {}", rows.len(), self.level);
        Ok(())
    }

    pub fn verify(&self) -> Result<(), Failure> {
        let g = &self.graph;
        let lengths = g.lengths();
        let mut failures: Vec<String> = Vec::new();
        let mut skipped: Vec<String> = Vec::new();

        let mut distinct: Vec<f64> = Vec::new();
        for &l in &lengths {
            if !distinct.iter().any(|&m| m == l) {
                distinct.push(l);
            }
        }
        let mut residues = Vec::new();
        for &l in &distinct {
            for kind in ResidueKind::ALL {
                for n in RESIDUE_INDICES.into_iter().filter(|&n| kind.accepts(n)) {
                    let reference = residue_reference(kind, n, l).map_err(solver_failure)?;
                    let (numeric, error) = match residue_numeric(kind, n, l, 1e-12) {
                        Ok(v) => (Some(v), (v - reference).norm()),
                        Err(_) => (None, f64::INFINITY),
                    };
                    let passed = error <= RESIDUE_TOL;
                    if !passed {
                        failures.push(format!("residue {} n={n} l={l}", kind.letter()));
                    }
                    residues.push(json!({
                        "kind": kind.letter().to_string(),
                        "n": n,
                        "length": l,
                        "reference": [reference.re, reference.im],
                        "numeric": numeric.map(|v| [v.re, v.im]),
                        "error": if error.is_finite() { json!(error) } else { Value::Null },
                        "passed": passed,
                    }));
                }
            }
        }

        // zero counts need the square to hold every negative eigenvalue, the
        // level to be past the asymptotic threshold, and the growth to stay in range
        let total: f64 = lengths.iter().sum();
        let floor = (-spectrum_lower_bound(g, &self.h))
            .max(0.0)
            .sqrt()
            .max(rouche_threshold(g, &self.h));
        let schedule = level_schedule(g, self.epsilon, self.level).map_err(solver_failure)?;
        let (usable, underpowered): (Vec<f64>, Vec<f64>) = schedule
            .levels
            .iter()
            .partition(|&&n| n >= 1.0 && n > floor && n * total <= MAX_GROWTH_EXPONENT);
        for n in &underpowered {
            skipped.push(format!(
                "zero and weyl counts at level {n}: below the asymptotic threshold or too tall"
            ));
        }
        let chosen = spread(&usable, MAX_ROUCHE_LEVELS);
        let mut rouche = Vec::new();
        let mut weyl = Vec::new();
        if chosen.is_empty() {
            skipped.push("weyl counts: no usable level".into());
        } else {
            let top = *chosen.last().expect("nonempty");
            let eigs =
                find_eigenvalues_unchecked(g, &self.h, top, self.tol).map_err(solver_failure)?;
            for &n in &chosen {
                let (phi_zeros, product_zeros) =
                    rouche_verify(g, &self.h, n, DEFAULT_QUAD_TOL).map_err(solver_failure)?;
                if phi_zeros != product_zeros {
                    failures.push(format!(
                        "zero count at level {n}: {phi_zeros} vs {product_zeros}"
                    ));
                }
                rouche.push(json!({
                    "level": n,
                    "phi_zeros": phi_zeros,
                    "product_zeros": product_zeros,
                    "passed": phi_zeros == product_zeros,
                }));
                let (found, expected) = (eigs.count_below(n), weyl_count(&lengths, n));
                if found != expected {
                    failures.push(format!("weyl count at level {n}: {found} vs {expected}"));
                }
                weyl.push(json!({"level": n, "found": found, "expected": expected, "passed": found == expected}));
            }
        }

        let mut decay = Vec::new();
        for target in DECAY_TARGETS {
            if target > self.level {
                skipped.push(format!("log-ratio decay at k = {target}: above the level"));
                continue;
            }
            let k = allowed_level(g, self.epsilon, target).map_err(solver_failure)?;
            let kc = Complex64::new(k, 0.0);
            let expansion = log_ratio(g, &self.h, kc, LogRatioVariant::VsProduct)
                .map_err(solver_failure)?
                .value;
            let numeric =
                log_ratio_numeric(g, &self.h, kc, LogRatioVariant::VsProduct, Some(expansion))
                    .map_err(solver_failure)?;
            decay.push(json!({"k": k, "scaled_error": k * k * (numeric - expansion).norm()}));
        }
        let scaled: Vec<f64> = decay
            .iter()
            .map(|d| d["scaled_error"].as_f64().expect("numeric"))
            .collect();
        let non_increasing = scaled.windows(2).all(|w| w[1] <= w[0]);

        let report = json!({
            "level": self.level,
            "passed": failures.is_empty(),
            "first_failure": failures.first(),
            "residues": residues,
            "rouche": rouche,
            "weyl": weyl,
            "log_ratio_decay": {"samples": decay, "non_increasing": non_increasing},
            "skipped": skipped,
        });
        if self.wants("json") {
            self.write_json("verify.json", &report)?;
        }
        match failures.first() {
            None => {
                println!("all checks passed ({} skipped)", skipped.len());
                Ok(())
            }
            Some(first) => Err(Failure {
                code: 4,
                message: format!("verification failed: {first}"),
            }),
        }
    }
}

/// Up to `count` entries spread evenly over `levels`, always including the last.
fn spread(levels: &[f64], count: usize) -> Vec<f64> {
    if levels.len() <= count {
        return levels.to_vec();
    }
    let step = (levels.len() - 1) as f64 / (count - 1) as f64;
    (0..count)
        .map(|i| levels[((i as f64 * step).round() as usize).min(levels.len() - 1)])
        .collect()
}
