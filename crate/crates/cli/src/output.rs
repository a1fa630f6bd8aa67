//! CSV tables, long-format plot data and the run manifest.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

/// A CSV table held in memory; cells are written verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Quotes a cell when it holds a comma or a quote.
pub fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotPoint {
    pub series: String,
    pub x: f64,
    pub y: f64,
    pub y_lo: Option<f64>,
    pub y_hi: Option<f64>,
}

impl PlotPoint {
    pub fn new(series: impl Into<String>, x: f64, y: f64, band: Option<(f64, f64)>) -> Self {
        PlotPoint { series: series.into(), x, y, y_lo: band.map(|b| b.0), y_hi: band.map(|b| b.1) }
    }
}

/// Long-format `series,x,y,y_lo,y_hi` table.
pub fn emit_plot_data(points: &[PlotPoint]) -> String {
    let mut t = Table::new(&["series", "x", "y", "y_lo", "y_hi"]);
    for p in points {
        t.push(vec![quote(&p.series), num(p.x), num(p.y), opt_num(p.y_lo), opt_num(p.y_hi)]);
    }
    t.render()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub config_hash: String,
    pub git_describe: String,
    pub seeds: Vec<u64>,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub status: String,
}

pub fn git_describe() -> String {
    std::process::Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".to_string())
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)
}
