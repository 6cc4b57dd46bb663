//! CSV tables and SVG line charts for sweep results.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sweep::{SweepPoint, SweepResult};
use crate::error::{Error, Result};

/// One CSV row. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis1: f64,
    pub axis2: f64,
    pub runs: u64,
    pub activated_mean: f64,
    pub activated_min: f64,
    pub activated_max: f64,
    pub energy_reduction_pct_mean: f64,
    pub active_joint_entropy_mean: f64,
    pub entropy_floored_fraction: f64,
    pub passes_mean: f64,
    pub passes_min: f64,
    pub passes_max: f64,
    pub messages_mean: f64,
    pub converged_fraction: f64,
}

pub const CSV_HEADER: &str = "axis1,axis2,runs,activated_mean,activated_min,activated_max,\
energy_reduction_pct_mean,active_joint_entropy_mean,entropy_floored_fraction,passes_mean,\
passes_min,passes_max,messages_mean,converged_fraction";

/// Columns that can be plotted.
pub const METRIC_COLUMNS: &[&str] = &[
    "runs",
    "activated_mean",
    "activated_min",
    "activated_max",
    "energy_reduction_pct_mean",
    "active_joint_entropy_mean",
    "entropy_floored_fraction",
    "passes_mean",
    "passes_min",
    "passes_max",
    "messages_mean",
    "converged_fraction",
];

impl From<&SweepPoint> for SweepRow {
    fn from(p: &SweepPoint) -> Self {
        Self {
            axis1: p.axis1,
            axis2: p.axis2,
            runs: p.runs as u64,
            activated_mean: p.activated.mean,
            activated_min: p.activated.min,
            activated_max: p.activated.max,
            energy_reduction_pct_mean: p.energy_reduction_pct.mean,
            active_joint_entropy_mean: p.active_joint_entropy.mean,
            entropy_floored_fraction: p.entropy_floored_fraction,
            passes_mean: p.passes.mean,
            passes_min: p.passes.min,
            passes_max: p.passes.max,
            messages_mean: p.messages.mean,
            converged_fraction: p.converged_fraction,
        }
    }
}

impl SweepRow {
    pub fn metric(&self, name: &str) -> Option<f64> {
        Some(match name {
            "runs" => self.runs as f64,
            "activated_mean" => self.activated_mean,
            "activated_min" => self.activated_min,
            "activated_max" => self.activated_max,
            "energy_reduction_pct_mean" => self.energy_reduction_pct_mean,
            "active_joint_entropy_mean" => self.active_joint_entropy_mean,
            "entropy_floored_fraction" => self.entropy_floored_fraction,
            "passes_mean" => self.passes_mean,
            "passes_min" => self.passes_min,
            "passes_max" => self.passes_max,
            "messages_mean" => self.messages_mean,
            "converged_fraction" => self.converged_fraction,
            _ => return None,
        })
    }
}

pub fn rows(result: &SweepResult) -> Vec<SweepRow> {
    result.points.iter().map(SweepRow::from).collect()
}

/// Renders the CSV text: header plus one newline-terminated row per point.
pub fn to_csv_string(result: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows(result) {
        let fields = [
            r.axis1,
            r.axis2,
            r.runs as f64,
            r.activated_mean,
            r.activated_min,
            r.activated_max,
            r.energy_reduction_pct_mean,
            r.active_joint_entropy_mean,
            r.entropy_floored_fraction,
            r.passes_mean,
            r.passes_min,
            r.passes_max,
            r.messages_mean,
            r.converged_fraction,
        ];
        let line: Vec<String> = fields.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv_string(result)).map_err(|e| Error::io(path, e))
}

/// Parses a file written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = reader.headers().map_err(csv_err)?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::InvalidArgument(format!(
            "{}: unexpected header {header:?}",
            path.display()
        )));
    }
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<SweepRow>, _>>()
        .map_err(csv_err)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * lo.abs().max(1.0) {
        return (lo - 1.0, hi + 1.0);
    }
    (lo, hi)
}

/// Renders one metric as an SVG line chart, one polyline per secondary-axis
/// value.
pub fn to_svg(result: &SweepResult, metric: &str) -> Result<String> {
    if !METRIC_COLUMNS.contains(&metric) {
        return Err(Error::InvalidArgument(format!(
            "unknown metric {metric:?}; expected one of {}",
            METRIC_COLUMNS.join(", ")
        )));
    }
    let rows = rows(result);
    let value = |r: &SweepRow| r.metric(metric).expect("known metric");
    let (x_lo, x_hi) = padded_range(rows.iter().map(|r| r.axis1));
    let (y_lo, y_hi) = padded_range(rows.iter().map(value));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut series: Vec<f64> = Vec::new();
    for r in &rows {
        if !series.contains(&r.axis2) {
            series.push(r.axis2);
        }
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{metric} vs {}</text>"#,
        LEFT + plot_w / 2.0,
        result.axis1_name
    );
    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#,
        y0 = TOP + plot_h,
        x1 = LEFT + plot_w
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{y0}" stroke="black"/>"#,
        y0 = TOP + plot_h
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let xv = x_lo + t * (x_hi - x_lo);
        let yv = y_lo + t * (y_hi - y_lo);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(xv),
            TOP + plot_h + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text class="x-label" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        result.axis1_name
    );
    let _ = writeln!(
        svg,
        r#"<text class="y-label" x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{metric}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let coords: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.axis2 == *s)
            .map(|r| (sx(r.axis1), sy(value(r))))
            .collect();
        let points: Vec<String> = coords.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" data-series="{s}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        for (x, y) in &coords {
            let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{} = {s}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            result.axis2_name
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

pub fn emit_plot(result: &SweepResult, metric: &str, path: &Path) -> Result<()> {
    let svg = to_svg(result, metric)?;
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(svg.as_bytes()).map_err(|e| Error::io(path, e))
}
