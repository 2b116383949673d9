//! CSV tables and minimal SVG line charts.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `# lmsample <version> seed=<seed> command=<command>`
pub fn metadata_line(seed: u64, command: &str) -> String {
    format!("# lmsample {VERSION} seed={seed} command={command}")
}

/// Shortest representation that reads back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v}")
    }
}

/// A CSV table with a metadata comment line and a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    pub meta: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(seed: u64, command: &str, header: &[&str]) -> Self {
        Self {
            meta: metadata_line(seed, command),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_f64(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| fmt_f64(v)).collect());
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.meta);
        let _ = writeln!(s, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }
}

/// Reads the first numeric column of a CSV (or one value per line), skipping
/// `#` comments and a non-numeric header. With `column`, reads that header.
pub fn read_series(path: &Path, column: Option<&str>) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut idx = 0usize;
    let mut out = Vec::new();
    let mut seen_header = false;
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if !seen_header && cells.iter().any(|c| c.parse::<f64>().is_err()) {
            seen_header = true;
            if let Some(col) = column {
                idx = cells.iter().position(|c| *c == col).ok_or_else(|| {
                    CliError::config(format!("{}: no column '{col}'", path.display()))
                })?;
            } else {
                idx = cells.len() - 1;
            }
            continue;
        }
        seen_header = true;
        let cell = cells.get(idx).ok_or_else(|| {
            CliError::config(format!("{}:{}: missing column", path.display(), no + 1))
        })?;
        out.push(cell.parse().map_err(|_| {
            CliError::config(format!(
                "{}:{}: '{cell}' is not a number",
                path.display(),
                no + 1
            ))
        })?);
    }
    Ok(out)
}

/// Writes `content` to `dir/name`, or to `stdout` when `dir` is `None`.
pub fn emit(dir: Option<&Path>, name: &str, content: &str, stdout: &mut dyn Write) -> Result<()> {
    match dir {
        Some(d) => write_file(&d.join(name), content),
        None => stdout
            .write_all(content.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

pub fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    std::fs::write(path, content).map_err(|e| CliError::io(PathBuf::from(path), e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// circles at the points instead of a line
    pub markers: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Panels side by side, each with its own axes.
pub fn svg_panels(panels: &[Panel], panel_w: f64, panel_h: f64) -> String {
    let (ml, mr, mt, mb) = (55.0, 15.0, 30.0, 45.0);
    let total_w = panel_w * panels.len() as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{panel_h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (pi, p) in panels.iter().enumerate() {
        let ox = pi as f64 * panel_w;
        let (x0, x1) = (ox + ml, ox + panel_w - mr);
        let (y0, y1) = (mt, panel_h - mb);
        let pts = p.series.iter().flat_map(|s| s.points.iter());
        let finite: Vec<(f64, f64)> = pts
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .copied()
            .collect();
        let (mut xmin, mut xmax, mut ymin, mut ymax) = bounds(&finite);
        if xmax <= xmin {
            xmin -= 0.5;
            xmax += 0.5;
        }
        if ymax <= ymin {
            ymin -= 0.5;
            ymax += 0.5;
        }
        let sx = |x: f64| x0 + (x - xmin) / (xmax - xmin) * (x1 - x0);
        let sy = |y: f64| y1 - (y - ymin) / (ymax - ymin) * (y1 - y0);
        let _ = writeln!(
            s,
            r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y1 - y0
        );
        if ymin < 0.0 && ymax > 0.0 {
            let z = sy(0.0);
            let _ = writeln!(
                s,
                r##"<line x1="{x0}" y1="{z:.2}" x2="{x1}" y2="{z:.2}" stroke="#999" stroke-dasharray="3,3"/>"##
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="18" text-anchor="middle" font-size="13">{}</text>"#,
            (x0 + x1) / 2.0,
            escape(&p.title)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            panel_h - 8.0,
            escape(&p.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
            ox + 14.0,
            (y0 + y1) / 2.0,
            ox + 14.0,
            (y0 + y1) / 2.0,
            escape(&p.y_label)
        );
        for (v, x) in [(xmin, x0), (xmax, x1)] {
            let _ = writeln!(
                s,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                y1 + 14.0,
                tick(v)
            );
        }
        for (v, y) in [(ymin, y1), (ymax, y0)] {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 4.0,
                y + 4.0,
                tick(v)
            );
        }
        for (si, ser) in p.series.iter().enumerate() {
            let color = PALETTE[si % PALETTE.len()];
            let visible = ser
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite());
            if ser.markers {
                for &(x, y) in visible {
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="none" stroke="{color}"/>"#,
                        sx(x),
                        sy(y)
                    );
                }
            } else {
                let coords: Vec<String> = visible
                    .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                    .collect();
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.2"/>"#,
                    coords.join(" ")
                );
            }
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" fill="{color}">{}</text>"#,
                x1 - 110.0,
                y0 + 14.0 * (si as f64 + 1.0),
                escape(&ser.label)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(pts: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    if pts.is_empty() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    let mut b = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in pts {
        b.0 = b.0.min(x);
        b.1 = b.1.max(x);
        b.2 = b.2.min(y);
        b.3 = b.3.max(y);
    }
    b
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
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
