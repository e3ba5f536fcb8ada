//! Run-directory artifacts: full-precision CSV tables, a minimal
//! self-contained log-log SVG emitter, and the machine-readable summary.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use aniso4nls::metrics::DecayFit;
use serde::Serialize;

/// CSV with a header line, LF endings, and 17-significant-digit floats so
/// downstream fits lose nothing.
pub fn write_csv(
    path: &Path,
    headers: &[&str],
    rows: &[Vec<f64>],
) -> Result<(), std::io::Error> {
    let mut out = String::new();
    out.push_str(&headers.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out)
}

/// One pass/fail record in the run summary; every record corresponds to an
/// acceptance assertion.
#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub bound: f64,
}

impl Assertion {
    /// `value <= bound` assertion.
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Assertion {
            name: name.into(),
            pass: value <= bound,
            value,
            bound,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub name: String,
    pub suite: String,
    pub seed: u64,
    pub all_pass: bool,
    pub assertions: Vec<Assertion>,
}

impl Summary {
    pub fn new(name: &str, suite: &str, seed: u64, assertions: Vec<Assertion>) -> Self {
        Summary {
            name: name.into(),
            suite: suite.into(),
            seed,
            all_pass: assertions.iter().all(|a| a.pass),
            assertions,
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), std::io::Error> {
        let text = toml::to_string_pretty(self)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        fs::write(path, text)
    }
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const ML: f64 = 70.0; // left margin
const MR: f64 = 20.0;
const MT: f64 = 40.0;
const MB: f64 = 50.0;

/// Log-log scatter of a positive series with an optional fitted power law,
/// emitted as a self-contained SVG document.
pub fn loglog_svg(title: &str, xlabel: &str, ylabel: &str, series: &[(f64, f64)], fit: Option<&DecayFit>) -> String {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|&&(t, v)| t > 0.0 && v > 0.0)
        .map(|&(t, v)| (t.log10(), v.log10()))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="monospace" font-size="15" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    if pts.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="13" text-anchor="middle">no positive data</text>"#,
            W / 2.0,
            H / 2.0
        );
        svg.push_str("</svg>\n");
        return svg;
    }
    let (mut x0, mut x1) = min_max(pts.iter().map(|p| p.0));
    let (mut y0, mut y1) = min_max(pts.iter().map(|p| p.1));
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let padx = 0.05 * (x1 - x0);
    let pady = 0.08 * (y1 - y0);
    let (x0, x1, y0, y1) = (x0 - padx, x1 + padx, y0 - pady, y1 + pady);
    let sx = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);

    // frame and decade ticks
    let _ = writeln!(
        svg,
        r#"<rect x="{ML}" y="{MT}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - ML - MR,
        H - MT - MB
    );
    for k in (x0.ceil() as i64)..=(x1.floor() as i64) {
        let x = sx(k as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{}" x2="{x:.1}" y2="{}" stroke="gray" stroke-dasharray="2,4"/>"#,
            MT,
            H - MB
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{}" font-family="monospace" font-size="12" text-anchor="middle">1e{k}</text>"#,
            H - MB + 18.0
        );
    }
    for k in (y0.ceil() as i64)..=(y1.floor() as i64) {
        let y = sy(k as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{ML}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="gray" stroke-dasharray="2,4"/>"#,
            W - MR
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{y:.1}" font-family="monospace" font-size="12" text-anchor="end">1e{k}</text>"#,
            ML - 6.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="monospace" font-size="13" text-anchor="middle">{}</text>"#,
        (ML + W - MR) / 2.0,
        H - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" font-family="monospace" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0,
        escape(ylabel)
    );

    // fitted power law as a dashed line across the x-range
    if let Some(f) = fit {
        let ln10 = std::f64::consts::LN_10;
        let yy = |x: f64| (f.intercept + f.exponent * x * ln10) / ln10;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="firebrick" stroke-dasharray="6,4"/>"#,
            sx(x0),
            sy(yy(x0)),
            sx(x1),
            sy(yy(x1))
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="12" fill="firebrick">slope {:.4}</text>"#,
            ML + 10.0,
            MT + 18.0,
            f.exponent
        );
    }

    let path: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
        .collect();
    let _ = writeln!(
        svg,
        r#"<polyline points="{}" fill="none" stroke="steelblue"/>"#,
        path.join(" ")
    );
    for &(x, y) in &pts {
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="steelblue"/>"#,
            sx(x),
            sy(y)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn min_max(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
