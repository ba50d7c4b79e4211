//! Minimal self-contained SVG plots: log-scaled outage against the sweep
//! variable. Analytic series are lines, Monte Carlo series are markers.

use std::fmt::Write as _;
use std::path::Path;

use crate::cli::config::{EvalMethod, Scale, SweepParam};
use crate::cli::sweep::ResultRow;
use crate::error::{Error, Result};
use crate::scheme::Scheme;

/// Values below this are drawn on the bottom edge and flagged.
pub const Y_FLOOR: f64 = 1e-8;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 300.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
    "#7f7f7f", "#bcbd22",
];

/// Rows of one curve of a family, with its label (may be empty).
pub struct CurveRows<'a> {
    pub label: &'a str,
    pub rows: &'a [ResultRow],
}

struct Series {
    name: String,
    color: &'static str,
    method: EvalMethod,
    square: bool,
    points: Vec<(f64, f64)>,
}

fn collect_series(curves: &[CurveRows]) -> Vec<Series> {
    let mut series: Vec<Series> = Vec::new();
    let mut color_keys: Vec<String> = Vec::new();
    for c in curves {
        for r in c.rows {
            let Some(y) = r.outage else { continue };
            let color_key = format!("{}|{}|{}", c.label, r.scheme, r.user);
            let name = if c.label.is_empty() {
                format!("{} user {} {}", r.scheme, r.user, r.method)
            } else {
                format!("{} user {} {} [{}]", r.scheme, r.user, r.method, c.label)
            };
            let idx = match color_keys.iter().position(|k| *k == color_key) {
                Some(i) => i,
                None => {
                    color_keys.push(color_key);
                    color_keys.len() - 1
                }
            };
            match series.iter_mut().find(|s| s.name == name) {
                Some(s) => s.points.push((r.value, y)),
                None => series.push(Series {
                    name,
                    color: PALETTE[idx % PALETTE.len()],
                    method: r.method,
                    square: r.scheme == Scheme::Oma,
                    points: vec![(r.value, y)],
                }),
            }
        }
    }
    series
}

pub fn render_svg(curves: &[CurveRows], param: SweepParam, scale: Scale) -> String {
    let series = collect_series(curves);
    let xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    let (mut xmin, mut xmax) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if !xmin.is_finite() {
        (xmin, xmax) = (0.0, 1.0);
    }
    if xmin == xmax {
        (xmin, xmax) = (xmin - 0.5, xmax + 0.5);
    }
    let log_x = scale == Scale::Log && xmin > 0.0;
    let tx = |x: f64| if log_x { x.log10() } else { x };
    let (x0, x1) = (tx(xmin), tx(xmax));

    let ymin_seen = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .filter(|&y| y > 0.0)
        .fold(1.0f64, f64::min)
        .max(Y_FLOOR);
    let y_lo_dec = ymin_seen.log10().floor().min(-1.0);

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (tx(x) - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (0.0 - y.clamp(Y_FLOOR, 1.0).log10()) / (0.0 - y_lo_dec) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    // y decades
    let mut dec = y_lo_dec as i32;
    while dec <= 0 {
        let y = py(10f64.powi(dec));
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{dec}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0
        );
        dec += 1;
    }
    // x ticks
    let ticks: Vec<f64> = if log_x {
        (x0.floor() as i32..=x1.ceil() as i32)
            .map(|d| 10f64.powi(d))
            .filter(|&v| v >= xmin * (1.0 - 1e-9) && v <= xmax * (1.0 + 1e-9))
            .collect()
    } else {
        (0..=5).map(|i| xmin + (xmax - xmin) * i as f64 / 5.0).collect()
    };
    for t in ticks {
        let x = px(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + ph,
            TOP + ph + 18.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        param.label()
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">outage probability</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for sr in &series {
        if sr.method == EvalMethod::Analytic && sr.points.len() > 1 {
            let pts: Vec<String> = sr
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                sr.color,
                pts.join(" ")
            );
        }
        for &(x, y) in &sr.points {
            let (cx, cy) = (px(x), py(y));
            if y < Y_FLOOR {
                let _ = writeln!(
                    s,
                    r#"<path class="clamped" d="M{:.2},{:.2} L{:.2},{:.2} L{cx:.2},{:.2} Z" fill="{}"/>"#,
                    cx - 5.0,
                    cy - 8.0,
                    cx + 5.0,
                    cy - 8.0,
                    cy,
                    sr.color
                );
            } else if sr.method == EvalMethod::Mc {
                s.push_str(&marker(sr, cx, cy));
            } else if sr.points.len() == 1 {
                let _ = writeln!(s, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="2.5" fill="{}"/>"#, sr.color);
            }
        }
    }

    // legend
    let lx = LEFT + pw + 15.0;
    for (i, sr) in series.iter().enumerate() {
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let mark = match sr.method {
            EvalMethod::Analytic => format!(
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="1.5"/>"#,
                lx + 20.0,
                sr.color
            ),
            EvalMethod::Mc => marker(sr, lx + 10.0, ly).trim_end().to_string(),
        };
        let _ = writeln!(
            s,
            r#"{mark}<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            sr.name
        );
    }
    let ly = TOP + 10.0 + 18.0 * series.len() as f64;
    let _ = writeln!(
        s,
        r##"<text x="{lx:.2}" y="{:.2}" fill="#555555">triangles: below {Y_FLOOR:e}</text>"##,
        ly + 4.0
    );
    s.push_str("</svg>\n");
    s
}

fn marker(sr: &Series, cx: f64, cy: f64) -> String {
    if sr.square {
        format!(
            r#"<rect x="{:.2}" y="{:.2}" width="7" height="7" fill="none" stroke="{}"/>"#,
            cx - 3.5,
            cy - 3.5,
            sr.color
        ) + "\n"
    } else {
        format!(r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="3.5" fill="none" stroke="{}"/>"#, sr.color) + "\n"
    }
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

pub fn emit_plot(curves: &[CurveRows], param: SweepParam, scale: Scale, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(curves, param, scale)).map_err(|e| Error::io(path, e))
}
