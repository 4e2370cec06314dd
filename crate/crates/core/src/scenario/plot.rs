//! Minimal deterministic SVG line plots.

use std::fmt::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
}

impl PlotStyle {
    /// Photocurrent against log time.
    pub fn photocurrent() -> Self {
        Self {
            title: "Photocurrent".into(),
            x_label: "t (s)".into(),
            y_label: "J (A/m^2)".into(),
            log_x: true,
            log_y: false,
        }
    }

    pub fn field() -> Self {
        Self {
            title: "Field magnitude".into(),
            x_label: "x (m)".into(),
            y_label: "|E| (V/m)".into(),
            log_x: false,
            log_y: false,
        }
    }

    pub fn density() -> Self {
        Self {
            title: "Carrier densities".into(),
            x_label: "x (m)".into(),
            y_label: "density (m^-3)".into(),
            log_x: false,
            log_y: true,
        }
    }
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];
const DASHES: [&str; 3] = ["", "6 3", "2 2"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn emit_plot(series: &[Series], style: &PlotStyle) -> Result<String> {
    let tx = |v: f64| if style.log_x { v.log10() } else { v };
    let ty = |v: f64| if style.log_y { v.log10() } else { v };
    let ok = |x: f64, y: f64| {
        x.is_finite() && y.is_finite() && (!style.log_x || x > 0.0) && (!style.log_y || y > 0.0)
    };
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| s.x.iter().zip(&s.y).filter(|(x, y)| ok(**x, **y)).map(|(x, y)| (tx(*x), ty(*y))).collect())
        .collect();
    if pts.iter().all(Vec::is_empty) {
        return Err(Error::Empty("nothing to plot".into()));
    }
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        let pad = if y0 == 0.0 { 1.0 } else { 0.05 * y0.abs() };
        y0 -= pad;
        y1 += pad;
    }
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#, W / 2.0, esc(&style.title));
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let xl = if style.log_x { format!("1e{xv:.1}") } else { format!("{xv:.3e}") };
        let yl = if style.log_y { format!("1e{yv:.1}") } else { format!("{yv:.3e}") };
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">{xl}</text>"#, sx(xv), TOP + ph + 16.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">{yl}</text>"#, LEFT - 4.0, sy(yv) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#, LEFT + pw / 2.0, H - 16.0, esc(&style.x_label));
    let _ = writeln!(s, r#"<text x="16" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {:.1})">{}</text>"#, TOP + ph / 2.0, TOP + ph / 2.0, esc(&style.y_label));
    for (k, (p, ser)) in pts.iter().zip(series).enumerate() {
        if p.is_empty() {
            continue;
        }
        let path: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let dash = DASHES[(k / COLOURS.len() + k) % DASHES.len()];
        let dash_attr = if dash.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{dash}""#) };
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{}" stroke-width="1.5"{dash_attr} points="{}"/>"#, COLOURS[k % COLOURS.len()], path.join(" "));
        let ly = TOP + 16.0 + 16.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="1.5"{dash_attr}/>"#, W - RIGHT - 150.0, W - RIGHT - 126.0, COLOURS[k % COLOURS.len()]);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11">{}</text>"#, W - RIGHT - 120.0, ly + 4.0, esc(&ser.label));
    }
    s.push_str("</svg>\n");
    Ok(s)
}
