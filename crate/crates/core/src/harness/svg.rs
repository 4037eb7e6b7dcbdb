//! Minimal deterministic SVG line charts with optional ±1 std bands.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const MAX_POINTS: usize = 1000;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub mean: Vec<f64>,
    pub std: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Tick step of the form {1, 2, 5} x 10^k giving at most about `target` ticks.
fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = if lo.abs() > 0.0 { lo.abs() * 0.1 } else { 1.0 };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn stride_indices(len: usize) -> Vec<usize> {
    if len <= MAX_POINTS {
        return (0..len).collect();
    }
    let step = len.div_ceil(MAX_POINTS);
    let mut idx: Vec<usize> = (0..len).step_by(step).collect();
    if idx.last() != Some(&(len - 1)) {
        idx.push(len - 1);
    }
    idx
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    };
    format!("{v:.decimals$}")
}

impl Chart {
    pub fn render(&self) -> String {
        let (x0, x1) = range(self.series.iter().flat_map(|s| s.x.iter().copied()));
        let (mut y0, mut y1) = range(self.series.iter().flat_map(|s| {
            let band: Vec<f64> = match &s.std {
                Some(std) => s
                    .mean
                    .iter()
                    .zip(std)
                    .flat_map(|(m, sd)| [m - sd, m + sd])
                    .collect(),
                None => Vec::new(),
            };
            s.mean.iter().copied().chain(band)
        }));
        let y_step = nice_step(y1 - y0, 6);
        y0 = (y0 / y_step).floor() * y_step;
        y1 = (y1 / y_step).ceil() * y_step;
        let x_step = nice_step(x1 - x0, 8);

        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(
            out,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        // Grid and ticks.
        let mut y = y0;
        while y <= y1 + y_step * 1e-9 {
            let py = sy(y);
            let _ = writeln!(
                out,
                r##"<line x1="{LEFT:.1}" y1="{py:.2}" x2="{:.1}" y2="{py:.2}" stroke="#e0e0e0"/>"##,
                LEFT + pw
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                py + 4.0,
                fmt_tick(y, y_step)
            );
            y += y_step;
        }
        let mut x = (x0 / x_step).ceil() * x_step;
        while x <= x1 + x_step * 1e-9 {
            let px = sx(x);
            let _ = writeln!(
                out,
                r#"<text x="{px:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
                TOP + ph + 18.0,
                fmt_tick(x, x_step)
            );
            x += x_step;
        }
        let _ = writeln!(
            out,
            r#"<rect class="plot-area" x="{LEFT:.1}" y="{TOP:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for (k, s) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let idx = stride_indices(s.x.len().min(s.mean.len()));
            if let Some(std) = &s.std {
                let mut pts = String::new();
                for &i in &idx {
                    let _ = write!(pts, "{:.2},{:.2} ", sx(s.x[i]), sy(s.mean[i] + std[i]));
                }
                for &i in idx.iter().rev() {
                    let _ = write!(pts, "{:.2},{:.2} ", sx(s.x[i]), sy(s.mean[i] - std[i]));
                }
                let _ = writeln!(
                    out,
                    r#"<polygon class="band" points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#,
                    pts.trim_end()
                );
            }
            let mut pts = String::new();
            for &i in &idx {
                let _ = write!(pts, "{:.2},{:.2} ", sx(s.x[i]), sy(s.mean[i]));
            }
            let _ = writeln!(
                out,
                r#"<polyline class="series" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                pts.trim_end()
            );
            let ly = TOP + 16.0 + 18.0 * k as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="3"/>"#,
                LEFT + 12.0,
                LEFT + 32.0
            );
            let _ = writeln!(
                out,
                r#"<text class="legend" x="{:.1}" y="{:.1}">{}</text>"#,
                LEFT + 38.0,
                ly + 4.0,
                escape(&s.name)
            );
        }
        out.push_str("</svg>\n");
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
        }
        std::fs::write(path, self.render()).map_err(|e| Error::io(path, e))
    }
}
