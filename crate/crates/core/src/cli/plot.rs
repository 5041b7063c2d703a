//! Minimal deterministic SVG line charts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::asympt::EnvelopeFit;
use crate::error::Result;
use crate::integrate::Trajectory;

pub const WIDTH: f64 = 960.0;
pub const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
/// Per-series cap on drawn points; longer series are reduced to min/max pairs per bucket.
const MAX_POINTS: usize = 2400;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
}

fn reduce(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(&x, &y)| (x, y))
        .collect();
    if pts.len() <= MAX_POINTS {
        return pts;
    }
    let buckets = MAX_POINTS / 2;
    let size = pts.len().div_ceil(buckets);
    let mut out = Vec::with_capacity(MAX_POINTS);
    for chunk in pts.chunks(size) {
        let (mut lo, mut hi) = (0, 0);
        for (i, p) in chunk.iter().enumerate() {
            if p.1 < chunk[lo].1 {
                lo = i;
            }
            if p.1 > chunk[hi].1 {
                hi = i;
            }
        }
        let (a, b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        out.push(chunk[a]);
        if b != a {
            out.push(chunk[b]);
        }
    }
    out
}

fn nice_ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / count as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Render a line chart with axes, ticks and a legend.
pub fn line_chart(title: &str, x_label: &str, series: &[Series]) -> String {
    let reduced: Vec<Vec<(f64, f64)>> = series.iter().map(|s| reduce(s.xs, s.ys)).collect();
    let all = reduced.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x0 = if x0.is_finite() { x0 - 1.0 } else { 0.0 };
        x1 = x0 + 2.0;
    }
    if !(y1 > y0) {
        let c = if y0.is_finite() { y0 } else { 0.0 };
        y0 = c - 1.0;
        y1 = c + 1.0;
    } else {
        let pad = 0.05 * (y1 - y0);
        y0 -= pad;
        y1 += pad;
    }
    let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_TOP + (y1 - y) / (y1 - y0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in nice_ticks(x0, x1, 8) {
        let x = sx(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"##,
            MARGIN_TOP,
            MARGIN_TOP + ph,
            MARGIN_TOP + ph + 16.0,
            fmt_tick(t)
        );
    }
    for t in nice_ticks(y0, y1, 6) {
        let y = sy(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"##,
            MARGIN_LEFT + pw,
            MARGIN_LEFT - 6.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    for (k, (s, pts)) in series.iter().zip(&reduced).enumerate() {
        if !pts.is_empty() {
            let mut d = String::with_capacity(pts.len() * 16);
            for (i, &(x, y)) in pts.iter().enumerate() {
                let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, sx(x), sy(y));
            }
            let _ = writeln!(
                svg,
                r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1"/>"#,
                s.color
            );
        }
        let ly = MARGIN_TOP + 16.0 + 16.0 * k as f64;
        let lx = MARGIN_LEFT + pw - 150.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 20.0,
            s.color,
            lx + 26.0,
            ly + 4.0,
            escape(s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Write the three standard plots of a run into `dir`.
pub fn emit_plots(
    dir: &Path,
    name: &str,
    traj: &Trajectory,
    fit: Option<&EnvelopeFit>,
) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    let amp = fit.map(|f| f.amplitude).unwrap_or(0.0);
    let upper: Vec<f64> = (0..traj.len()).map(|i| amp / traj.a(i)).collect();
    let lower: Vec<f64> = upper.iter().map(|v| -v).collect();
    let svg = line_chart(
        &format!("{name}: x(t) with fitted envelope"),
        "t",
        &[
            Series { label: "x", color: "#1f77b4", xs: &traj.times, ys: &traj.x },
            Series { label: "+amplitude/A", color: "#d62728", xs: &traj.times, ys: &upper },
            Series { label: "-amplitude/A", color: "#d62728", xs: &traj.times, ys: &lower },
        ],
    );
    let p = dir.join("envelope.svg");
    std::fs::write(&p, svg)?;
    paths.push(p);

    let svg = line_chart(
        &format!("{name}: normalized integrals"),
        "t",
        &[
            Series { label: "U2", color: "#2ca02c", xs: &traj.times, ys: &traj.u2 },
            Series { label: "V2", color: "#9467bd", xs: &traj.times, ys: &traj.v2 },
        ],
    );
    let p = dir.join("normalized.svg");
    std::fs::write(&p, svg)?;
    paths.push(p);

    let (lo, hi) = fit.map(|f| f.window).unwrap_or((traj.t0, traj.t_end()));
    let a = traj.index_at(lo);
    let b = traj.times.partition_point(|&t| t <= hi).max(a + 1).min(traj.len());
    let ts = &traj.times[a..b];
    let ax: Vec<f64> = (a..b).map(|i| traj.a(i) * traj.x[i]).collect();
    let model: Vec<f64> = ts
        .iter()
        .map(|&t| match fit {
            Some(f) => f.c_sin * (traj.omega * t).sin() + f.c_cos * (traj.omega * t).cos(),
            None => 0.0,
        })
        .collect();
    let svg = line_chart(
        &format!("{name}: A(t)x(t) against fitted sinusoid"),
        "t",
        &[
            Series { label: "A x", color: "#1f77b4", xs: ts, ys: &ax },
            Series { label: "fit", color: "#ff7f0e", xs: ts, ys: &model },
        ],
    );
    let p = dir.join("fit.svg");
    std::fs::write(&p, svg)?;
    paths.push(p);
    Ok(paths)
}
