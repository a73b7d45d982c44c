//! Deterministic SVG line and scatter charts.

use std::fmt::Write as _;
use std::path::Path;

use crate::output::{write, Table};
use crate::CliError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const TICKS: usize = 5;

struct Series {
    label: String,
    xs: Vec<f64>,
    ys: Vec<f64>,
    color: &'static str,
    dashed: bool,
    markers_only: bool,
}

struct Chart {
    title: String,
    x_label: &'static str,
    y_label: &'static str,
    series: Vec<Series>,
}

fn series(t: &Table, x: &str, y: &str, color: &'static str, dashed: bool) -> Option<Series> {
    Some(Series {
        label: y.to_string(),
        xs: t.column(x)?,
        ys: t.column(y)?,
        color,
        dashed,
        markers_only: false,
    })
}

fn chart_for(t: &Table, title: String) -> Option<Chart> {
    let first: Vec<&str> = t.header.iter().take(2).map(String::as_str).collect();
    let chart = match first.as_slice() {
        ["E", "value"] => {
            let mut s = vec![series(t, "E", "value", "#1f77b4", false)?];
            for (col, color) in [
                ("bracket_lower", "#d62728"),
                ("bracket_upper", "#2ca02c"),
                ("from_gamma", "#9467bd"),
            ] {
                s.extend(series(t, "E", col, color, true));
            }
            Chart {
                title,
                x_label: "E",
                y_label: "E-norm",
                series: s,
            }
        }
        ["E", "ratio"] => Chart {
            title,
            x_label: "E",
            y_label: "value / sqrt(E)",
            series: vec![series(t, "E", "ratio", "#1f77b4", false)?],
        },
        ["E", "Y"] => Chart {
            title,
            x_label: "E",
            y_label: "Y(E)",
            series: vec![series(t, "E", "Y", "#1f77b4", false)?],
        },
        ["a", "b"] => {
            let mut s = series(t, "b", "a", "#1f77b4", false)?;
            s.label = "frontier (b, a)".into();
            s.markers_only = true;
            Chart {
                title,
                x_label: "b",
                y_label: "a",
                series: vec![s],
            }
        }
        _ => return None,
    };
    Some(chart)
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
        (l.min(v), h.max(v))
    });
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = 0.5 * lo.abs().max(1.0);
        (lo - pad, hi + pad)
    }
}

fn render(chart: &Chart) -> String {
    let (x0, x1) = span(chart.series.iter().flat_map(|s| s.xs.iter().copied()));
    let (y0, y1) = span(chart.series.iter().flat_map(|s| s.ys.iter().copied()));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&chart.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (tx, ty) = (px(xv), py(yv));
        let _ = writeln!(
            s,
            r##"<line x1="{tx:.2}" y1="{:.2}" x2="{tx:.2}" y2="{:.2}" stroke="#ccc"/><text x="{tx:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP,
            TOP + ph,
            TOP + ph + 16.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="#ccc"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            ty + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 14.0,
        chart.x_label
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        chart.y_label
    );
    for (k, ser) in chart.series.iter().enumerate() {
        let pts: Vec<String> = ser
            .xs
            .iter()
            .zip(&ser.ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        if ser.markers_only {
            for p in &pts {
                let (cx, cy) = p.split_once(',').unwrap();
                let _ = writeln!(
                    s,
                    r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{}"/>"#,
                    ser.color
                );
            }
        } else {
            let dash = if ser.dashed {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
                pts.join(" "),
                ser.color
            );
        }
        let ly = TOP + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            LEFT + 10.0,
            LEFT + 30.0,
            ser.color,
            LEFT + 36.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Render the chart for `input` into `target`; nothing is written on error.
pub fn render_file(input: &Path, target: &Path) -> Result<(), CliError> {
    let table = Table::read(input)?;
    let bad = |msg: &str| CliError::Parse(input.to_path_buf(), msg.to_string());
    if table.rows.is_empty() {
        return Err(bad("empty curve: no data rows"));
    }
    if table.rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(bad("non-finite value"));
    }
    let title = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let chart = chart_for(&table, title)
        .ok_or_else(|| bad("unrecognized columns; expected E,value / E,ratio / E,Y / a,b"))?;
    write(target, &render(&chart))
}
