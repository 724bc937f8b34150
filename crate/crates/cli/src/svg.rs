use std::fmt::Write as _;

use qgraph::trace::TraceReport;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;

/// Partial sums against the level, with the right-hand side as a dashed line.
pub fn convergence_plot(report: &TraceReport) -> String {
    let xs: Vec<f64> = report.partial_sums.iter().map(|p| p.level).collect();
    let ys: Vec<f64> = report.partial_sums.iter().map(|p| p.sum).collect();
    let (x0, x1) = range(xs.iter().copied());
    let (y0, y1) = range(ys.iter().copied().chain([report.rhs]));
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {b} H{r} M{m} {b} V{m}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#c03030" stroke-dasharray="6 4"/>"##,
        MARGIN,
        WIDTH - MARGIN,
        y = py(report.rhs)
    );
    let points: Vec<String> = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline points="{}" stroke="#2050a0" fill="none"/>"##,
        points.join(" ")
    );
    for p in &points {
        let (x, y) = p.split_once(',').expect("point has two coordinates");
        let _ = writeln!(s, r##"<circle cx="{x}" cy="{y}" r="2.5" fill="#2050a0"/>"##);
    }
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, text: String| {
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="12" text-anchor="{anchor}">{text}</text>"#
        );
    };
    label(
        &mut s,
        MARGIN,
        HEIGHT - MARGIN + 18.0,
        "middle",
        format!("{x0:.4}"),
    );
    label(
        &mut s,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 18.0,
        "middle",
        format!("{x1:.4}"),
    );
    label(
        &mut s,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        "middle",
        "level N".into(),
    );
    label(
        &mut s,
        MARGIN - 6.0,
        HEIGHT - MARGIN,
        "end",
        format!("{y0:.4}"),
    );
    label(&mut s, MARGIN - 6.0, MARGIN, "end", format!("{y1:.4}"));
    label(
        &mut s,
        WIDTH - MARGIN,
        py(report.rhs) - 6.0,
        "end",
        format!("rhs = {:.7}", report.rhs),
    );
    label(
        &mut s,
        MARGIN,
        MARGIN - 20.0,
        "start",
        "partial sums S_p".into(),
    );
    s.push_str("</svg>\n");
    s
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !(hi > lo) {
        let pad = lo.abs().max(1.0) * 0.5;
        return (lo - pad, lo + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}
