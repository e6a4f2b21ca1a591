//! Deterministic report writers: CSV and JSON with numbers rounded to 12
//! significant digits, and an SVG plot of the counting function against the
//! three linear bounds.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::bounds::{convex_coefficient, kroger_coefficient, polya_coefficient, BoundReport};
use crate::error::{Error, Result};

/// Significant digits kept in every emitted float.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

/// Shortest decimal that round-trips the 12-digit rounding of `x`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    format!("{r}")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => fmt_num(n.as_f64().expect("f64 number")),
        Value::Number(n) => n.to_string(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// CSV with the given columns, taken by name from each serialized row.
pub fn to_csv<T: Serialize>(rows: &[T], columns: &[&str]) -> Result<String> {
    let mut s = columns.join(",");
    s.push('\n');
    for row in rows {
        let v = serde_json::to_value(row)?;
        let obj = v.as_object().ok_or_else(|| Error::Computation("CSV rows must serialize to objects".into()))?;
        let cells: Vec<String> = columns.iter().map(|c| obj.get(*c).map_or_else(String::new, csv_cell)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    Ok(s)
}

pub fn reports_csv(reports: &[BoundReport]) -> Result<String> {
    to_csv(reports, &BoundReport::COLUMNS)
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 450.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 48.0;

/// Step plot of `N_N(λ)` on `[0, lambda_max]` from `eigenvalues`, with the
/// Kröger, convex and Pólya lines for a domain of area `area`, and the
/// verified `(λ, N_N)` points of `reports` as markers.
pub fn counting_svg(eigenvalues: &[f64], area: f64, lambda_max: f64, reports: &[BoundReport]) -> String {
    let lambda_max = if lambda_max > 0.0 && lambda_max.is_finite() { lambda_max } else { 1.0 };
    let mut sorted: Vec<f64> = eigenvalues.iter().copied().filter(|m| *m <= lambda_max).collect();
    sorted.sort_by(f64::total_cmp);
    let polya_c = polya_coefficient(2).expect("d = 2 is valid");
    let kroger_c = kroger_coefficient(2).expect("d = 2 is valid");
    let convex_c = convex_coefficient();
    let y_max = (sorted.len() as f64).max(polya_c * area * lambda_max).max(1.0) * 1.05;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + plot_w * x / lambda_max;
    let sy = |y: f64| MARGIN_TOP + plot_h * (1.0 - y / y_max);
    let c = |x: f64| format!("{:.2}", x);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" font-family="sans-serif" font-size="14">Neumann counting function, area {}</text>"#,
        c(MARGIN_LEFT),
        fmt_num(area)
    );
    // Axes and ticks.
    let (x0, y0) = (sx(0.0), sy(0.0));
    let _ = writeln!(
        s,
        r#"<path d="M {} {} H {} M {} {} V {}" stroke="black" fill="none"/>"#,
        c(x0),
        c(y0),
        c(sx(lambda_max)),
        c(x0),
        c(y0),
        c(sy(y_max))
    );
    for i in 0..=5 {
        let xv = lambda_max * i as f64 / 5.0;
        let yv = y_max * i as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            c(sx(xv)),
            c(y0 + 16.0),
            fmt_num((xv * 100.0).round() / 100.0)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            c(x0 - 6.0),
            c(sy(yv) + 4.0),
            fmt_num((yv * 10.0).round() / 10.0)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">λ</text>"#,
        c(MARGIN_LEFT + plot_w / 2.0),
        c(HEIGHT - 10.0)
    );

    // N_N(λ) is right-continuous and jumps at each eigenvalue.
    let mut d = format!("M {} {}", c(x0), c(y0));
    for (i, mu) in sorted.iter().enumerate() {
        let _ = write!(d, " H {} V {}", c(sx(*mu)), c(sy((i + 1) as f64)));
    }
    let _ = write!(d, " H {}", c(sx(lambda_max)));
    let _ = writeln!(s, r#"<path d="{d}" stroke="black" stroke-width="1.5" fill="none"/>"#);

    let lines = [("Kröger 1/(8π)", kroger_c, "#1f77b4"), ("convex 1/(2√3 j₀²)", convex_c, "#d62728"), ("Pólya 1/(4π)", polya_c, "#2ca02c")];
    for (k, (label, coeff, color)) in lines.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-dasharray="6 3"/>"#,
            c(x0),
            c(y0),
            c(sx(lambda_max)),
            c(sy(coeff * area * lambda_max))
        );
        let ly = MARGIN_TOP + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{label}</text>"#,
            c(MARGIN_LEFT + 12.0),
            c(ly)
        );
    }
    for r in reports.iter().filter(|r| r.lambda <= lambda_max) {
        let fill = if r.pass { "black" } else { "red" };
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{}" r="3" fill="{fill}"/>"#,
            c(sx(r.lambda)),
            c(sy(r.n_n as f64))
        );
    }
    s.push_str("</svg>\n");
    s
}
