//! Minimal deterministic SVG line plots: stacked panels, each with axes,
//! tick labels and a legend. Same input, same bytes.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlotError {
    #[error("nothing to plot")]
    Empty,
    #[error("series '{0}' has no points")]
    EmptySeries(String),
    #[error("series '{0}' contains a non-finite value")]
    NonFinite(String),
    #[error("series '{0}' has x <= 0 on a logarithmic axis")]
    NonPositiveLogX(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { name: name.into(), points }
    }

    /// Keeps at most `max_points` evenly strided points, always the last.
    pub fn decimated(name: impl Into<String>, points: &[(f64, f64)], max_points: usize) -> Self {
        let stride = points.len().div_ceil(max_points.max(2)).max(1);
        let mut kept: Vec<(f64, f64)> = points.iter().step_by(stride).copied().collect();
        if let Some(&last) = points.last() {
            if kept.last() != Some(&last) {
                kept.push(last);
            }
        }
        Self::new(name, kept)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
}

impl Panel {
    pub fn new(title: &str, x_label: &str, y_label: &str, log_x: bool, series: Vec<Series>) -> Self {
        Self { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), log_x, series }
    }
}

const WIDTH: f64 = 760.0;
const PANEL_HEIGHT: f64 = 320.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 52.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Short, stable tick label.
fn label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        let s = format!("{v:.2e}");
        let (m, e) = s.split_once('e').expect("exponent form");
        format!("{}e{e}", m.trim_end_matches('0').trim_end_matches('.'))
    }
}

fn nice_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    mag * if r < 1.5 {
        1.0
    } else if r < 3.5 {
        2.0
    } else if r < 7.5 {
        5.0
    } else {
        10.0
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let d = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - d, hi + d)
    }
}

/// Linear ticks covering `[lo, hi]`; the range is widened to whole steps.
fn linear_ticks(lo: f64, hi: f64) -> (f64, f64, Vec<f64>) {
    let step = nice_step(hi - lo);
    let (a, b) = ((lo / step).floor(), (hi / step).ceil());
    let ticks = (0..=(b - a) as i64).map(|k| (a + k as f64) * step).collect();
    (a * step, b * step, ticks)
}

/// Decade ticks in log10 units.
fn log_ticks(lo: f64, hi: f64) -> (f64, f64, Vec<f64>) {
    let (a, b) = (lo.log10().floor(), hi.log10().ceil().max(lo.log10().floor() + 1.0));
    let every = ((b - a) / 8.0).ceil().max(1.0);
    let ticks = (0..=((b - a) / every) as i64).map(|k| a + k as f64 * every).collect();
    (a, b, ticks)
}

fn check(panels: &[Panel]) -> Result<(), PlotError> {
    if panels.is_empty() || panels.iter().any(|p| p.series.is_empty()) {
        return Err(PlotError::Empty);
    }
    for p in panels {
        for s in &p.series {
            if s.points.is_empty() {
                return Err(PlotError::EmptySeries(s.name.clone()));
            }
            if s.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                return Err(PlotError::NonFinite(s.name.clone()));
            }
            if p.log_x && s.points.iter().any(|(x, _)| *x <= 0.0) {
                return Err(PlotError::NonPositiveLogX(s.name.clone()));
            }
        }
    }
    Ok(())
}

pub fn render(panels: &[Panel]) -> Result<String, PlotError> {
    check(panels)?;
    let height = PANEL_HEIGHT * panels.len() as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{height}" fill="white"/>"#);
    for (i, panel) in panels.iter().enumerate() {
        draw_panel(&mut out, panel, i as f64 * PANEL_HEIGHT);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn plot(panel: Panel) -> Result<String, PlotError> {
    render(&[panel])
}

fn draw_panel(out: &mut String, panel: &Panel, y0: f64) {
    let fx = |x: f64| if panel.log_x { x.log10() } else { x };
    let all = || panel.series.iter().flat_map(|s| s.points.iter());
    let (xmin, xmax) = all().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(fx(p.0)), b.max(fx(p.0))));
    let (ymin, ymax) = all().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let (ylo, yhi) = padded(ymin, ymax);
    let (ya, yb, yticks) = linear_ticks(ylo, yhi);
    let (xa, xb, xticks) = if panel.log_x {
        log_ticks(10f64.powf(xmin), 10f64.powf(xmax))
    } else {
        let (lo, hi) = padded(xmin, xmax);
        linear_ticks(lo, hi)
    };

    let (pl, pr) = (LEFT, WIDTH - RIGHT);
    let (pt, pb) = (y0 + TOP, y0 + PANEL_HEIGHT - BOTTOM);
    let sx = |x: f64| pl + (x - xa) / (xb - xa) * (pr - pl);
    let sy = |y: f64| pb - (y - ya) / (yb - ya) * (pb - pt);

    let _ = writeln!(out, r#"<g>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
        0.5 * (pl + pr),
        y0 + 22.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        out,
        r#"<rect x="{pl:.2}" y="{pt:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        pr - pl,
        pb - pt
    );
    for &t in &xticks {
        let x = sx(t);
        let text = if panel.log_x { label(10f64.powf(t)) } else { label(t) };
        let _ = writeln!(out, r##"<line x1="{x:.2}" y1="{pt:.2}" x2="{x:.2}" y2="{pb:.2}" stroke="#dddddd"/>"##);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{text}</text>"#, pb + 15.0);
    }
    for &t in &yticks {
        let y = sy(t);
        let _ = writeln!(out, r##"<line x1="{pl:.2}" y1="{y:.2}" x2="{pr:.2}" y2="{y:.2}" stroke="#dddddd"/>"##);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, pl - 6.0, y + 4.0, label(t));
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        0.5 * (pl + pr),
        pb + 36.0,
        escape(&panel.x_label)
    );
    let (lx, ly) = (18.0, 0.5 * (pt + pb));
    let _ = writeln!(
        out,
        r#"<text x="{lx:.2}" y="{ly:.2}" text-anchor="middle" transform="rotate(-90 {lx:.2} {ly:.2})">{}</text>"#,
        escape(&panel.y_label)
    );

    for (k, s) in panel.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(fx(x)), sy(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ey = pt + 14.0 + 18.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{ey:.2}" x2="{:.2}" y2="{ey:.2}" stroke="{color}" stroke-width="2"/>"#,
            pr + 12.0,
            pr + 36.0
        );
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, pr + 42.0, ey + 4.0, escape(&s.name));
    }
    let _ = writeln!(out, "</g>");
}
