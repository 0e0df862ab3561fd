//! CSV and SVG emission for curves.

use std::fmt::Write;

use npf_core::value::{rational_to_decimal, rational_to_f64};
use num_rational::BigRational;

/// Digits after the point in the decimal CSV columns; the numerator and
/// denominator columns carry the exact value.
const DECIMAL_DIGITS: usize = 20;

pub const CSV_HEADER: &str = "x,y,num_x,den_x,num_y,den_y";

fn csv_fields(x: &BigRational, y: &BigRational) -> String {
    format!(
        "{},{},{},{},{},{}",
        rational_to_decimal(x, DECIMAL_DIGITS),
        rational_to_decimal(y, DECIMAL_DIGITS),
        x.numer(),
        x.denom(),
        y.numer(),
        y.denom()
    )
}

pub fn csv(points: &[(BigRational, BigRational)]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (x, y) in points {
        out.push_str(&csv_fields(x, y));
        out.push('\n');
    }
    out
}

/// Several labelled curves in one table, with a leading `curve` column.
pub fn csv_labelled(curves: &[Curve]) -> String {
    let mut out = format!("curve,{CSV_HEADER}\n");
    for c in curves {
        for (x, y) in &c.points {
            let _ = writeln!(out, "{},{}", c.label, csv_fields(x, y));
        }
    }
    out
}

pub struct Curve {
    pub label: String,
    pub points: Vec<(BigRational, BigRational)>,
}

pub struct Plot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub curves: Vec<Curve>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn svg(plot: &Plot<'_>) -> String {
    let pts: Vec<Vec<(f64, f64)>> = plot
        .curves
        .iter()
        .map(|c| c.points.iter().map(|(x, y)| (rational_to_f64(x), rational_to_f64(y))).collect())
        .collect();
    let (x0, x1) = span(pts.iter().flatten().map(|p| p.0));
    let (y0, y1) = span(pts.iter().flatten().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<!-- coordinates are floating-point approximations of exact rational values -->\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(out, "<title>{}</title>", escape(plot.title));
    let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(out, "<line x1=\"{left}\" y1=\"{bottom}\" x2=\"{right}\" y2=\"{bottom}\" stroke=\"black\"/>");
    let _ = writeln!(out, "<line x1=\"{left}\" y1=\"{bottom}\" x2=\"{left}\" y2=\"{top}\" stroke=\"black\"/>");
    let text = |out: &mut String, x: f64, y: f64, anchor: &str, s: &str| {
        let _ = writeln!(
            out,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"{anchor}\">{}</text>",
            escape(s)
        );
    };
    text(&mut out, WIDTH / 2.0, HEIGHT - 12.0, "middle", plot.x_label);
    text(&mut out, 14.0, HEIGHT / 2.0, "start", plot.y_label);
    text(&mut out, WIDTH / 2.0, 24.0, "middle", plot.title);
    text(&mut out, left, bottom + 16.0, "middle", &format!("{x0:.4}"));
    text(&mut out, right, bottom + 16.0, "middle", &format!("{x1:.4}"));
    text(&mut out, left - 4.0, bottom, "end", &format!("{y0:.4}"));
    text(&mut out, left - 4.0, top + 4.0, "end", &format!("{y1:.4}"));
    for (k, (c, p)) in plot.curves.iter().zip(&pts).enumerate() {
        let color = COLORS[k % COLORS.len()];
        let coords: Vec<String> = p.iter().map(|(x, y)| format!("{:.3},{:.3}", sx(*x), sy(*y))).collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"><title>{}</title></polyline>",
            coords.join(" "),
            escape(&c.label)
        );
        if plot.curves.len() > 1 {
            text(&mut out, right + 2.0, top + 14.0 * k as f64, "start", &c.label);
        }
    }
    out.push_str("</svg>\n");
    out
}
