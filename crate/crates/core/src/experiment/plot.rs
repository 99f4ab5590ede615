//! Self-contained SVG line charts of mean rounds against `log₂ n`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::protocols::ProtocolKind;

use super::{summarize, ExperimentError, ExperimentRow};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Slopes of the dashed reference lines `c·log₂ n`.
pub fn reference_slopes(kind: ProtocolKind) -> [f64; 2] {
    match kind {
        ProtocolKind::HighLoad => [0.9, 1.1],
        _ => [1.2, 1.7],
    }
}

pub fn render_svg(rows: &[ExperimentRow]) -> Result<String, ExperimentError> {
    let first = rows.first().ok_or(ExperimentError::EmptyInput)?;
    let series = summarize(rows);
    let refs = reference_slopes(first.protocol);

    let xs = rows.iter().map(|r| r.n.trailing_zeros() as f64);
    let x_min = xs.clone().fold(f64::INFINITY, f64::min);
    let x_max = xs.fold(f64::NEG_INFINITY, f64::max).max(x_min + 1.0);
    let y_data = series.iter().map(|p| p.mean_rounds).fold(0.0, f64::max);
    let y_max = (refs[1] * x_max).max(y_data).max(1.0) * 1.05;

    let sx = |x: f64| MARGIN + (x - x_min) / (x_max - x_min) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - y / y_max * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, y0, x1, y1) = (sx(x_min), sy(0.0), sx(x_max), sy(y_max));
    let _ = writeln!(
        svg,
        r#"<path class="axes" d="M{x0:.2} {y1:.2} L{x0:.2} {y0:.2} L{x1:.2} {y0:.2}" stroke="black" fill="none"/>"#
    );
    let mut tick = x_min.ceil();
    while tick <= x_max {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(tick),
            y0 + 16.0,
            tick as i64
        );
        tick += 1.0;
    }
    let step = (y_max / 5.0).ceil().max(1.0);
    let mut yt = 0.0;
    while yt <= y_max {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            sy(yt) + 4.0,
            yt as i64
        );
        yt += step;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">log2 n</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">mean rounds to solution</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    for c in refs {
        let _ = writeln!(
            svg,
            r#"<line class="reference" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="6 4"/>"#,
            sx(x_min),
            sy(c * x_min),
            sx(x_max),
            sy(c * x_max)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" fill="gray">{c} log2 n</text>"#,
            sx(x_max) - 60.0,
            sy(c * x_max) - 4.0
        );
    }

    let mut labels: Vec<&str> = Vec::new();
    for p in &series {
        if !labels.contains(&p.dataset.as_str()) {
            labels.push(&p.dataset);
        }
    }
    for (k, label) in labels.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = series
            .iter()
            .filter(|p| p.dataset == *label)
            .map(|p| format!("{:.2},{:.2}", sx(p.log_n as f64), sy(p.mean_rounds)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" points="{}" stroke="{color}" stroke-width="2" fill="none"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" fill="{color}">{label}</text>"#,
            x0 + 10.0,
            y1 + 14.0 * (k as f64 + 1.0)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(rows: &[ExperimentRow], path: impl AsRef<Path>) -> Result<(), ExperimentError> {
    let svg = render_svg(rows)?;
    fs::write(path, svg)?;
    Ok(())
}
