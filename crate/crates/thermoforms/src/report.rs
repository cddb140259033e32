//! Verification reports and plot-ready tables.
//!
//! Each task produces one JSON report (self-describing: it embeds the full
//! run configuration and the config hash) plus one CSV file per table.
//! Numbers are written with Rust's shortest round-trip float formatting, so
//! identical runs produce bitwise-identical files; nothing time- or
//! machine-dependent is recorded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::ModelDescription;
use crate::error::{Error, Result};

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Num(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Cell {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Cell {
        Cell::Int(x as i64)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(x) => write!(f, "{x}"),
            // Positional for ordinary magnitudes, exponent for the rest;
            // both forms are shortest-round-trip, so parsing recovers the
            // exact bits either way.
            Cell::Num(x) => {
                let a = x.abs();
                if a == 0.0 || (1e-4..1e7).contains(&a) {
                    write!(f, "{x}")
                } else {
                    write!(f, "{x:e}")
                }
            }
            Cell::Text(s) => f.write_str(s),
        }
    }
}

/// A named table destined for `<task_id>.<name>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    name: String,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    /// A new table; the name becomes part of the file name and the columns
    /// form the header row. Names and headers must stay clear of CSV
    /// metacharacters — this is enforced, not assumed.
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Result<Table> {
        let name = name.into();
        if name.is_empty()
            || !name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(Error::Config(format!(
                "table name {name:?} must be non-empty and use only [A-Za-z0-9_-]"
            )));
        }
        for col in columns {
            check_csv_safe(col)?;
        }
        Ok(Table {
            name,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        })
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Config(format!(
                "table {}: row has {} cells, header has {}",
                self.name,
                row.len(),
                self.columns.len()
            )));
        }
        for cell in &row {
            if let Cell::Text(s) = cell {
                check_csv_safe(s)?;
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Comma-separated, header row first, every line LF-terminated.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for cell in row {
                if !first {
                    out.push(',');
                }
                let _ = write!(out, "{cell}");
                first = false;
            }
            out.push('\n');
        }
        out
    }
}

fn check_csv_safe(s: &str) -> Result<()> {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        return Err(Error::Config(format!(
            "text {s:?} would need CSV quoting; use plain labels"
        )));
    }
    Ok(())
}

/// Immutable run context recorded in every report.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Provenance {
    /// SHA-256 of the exact config document that produced this run.
    pub config_sha256: String,
    pub tool_version: String,
}

/// The outcome of one task.
#[derive(Debug, Clone, serde::Serialize)]
pub struct VerificationReport {
    pub task_id: String,
    /// Task kind (the config's `task` tag).
    pub task: String,
    /// Library module the task exercises.
    pub origin_module: String,
    pub model: ModelDescription,
    /// Residual bound the pass flag is judged against.
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub max_abs_residual: f64,
    pub mean_abs_residual: f64,
    /// True iff `max_abs_residual <= tolerance` and every task-specific side
    /// condition held.
    pub pass: bool,
    /// One-line human statement of what was checked and how it went.
    pub summary: String,
    /// CSV files written next to this report.
    pub table_files: Vec<String>,
    pub provenance: Provenance,
    /// The full configuration, echoed so the report can be re-run as-is.
    pub config: serde_json::Value,
}

impl VerificationReport {
    /// `<task_id>.report.json`.
    pub fn file_name(&self) -> String {
        format!("{}.report.json", self.task_id)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// Accumulates residual magnitudes into the max/mean pair reports carry.
#[derive(Debug, Clone, Copy, Default)]
pub struct ResidualStats {
    max_abs: f64,
    sum_abs: f64,
    count: usize,
}

impl ResidualStats {
    pub fn new() -> ResidualStats {
        ResidualStats::default()
    }

    pub fn record(&mut self, residual: f64) {
        let a = residual.abs();
        if a > self.max_abs {
            self.max_abs = a;
        }
        self.sum_abs += a;
        self.count += 1;
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn mean_abs(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum_abs / self.count as f64
        }
    }
}

/// Writes the report and its tables into `dir`, returning the paths written.
pub fn write_outputs(
    dir: &Path,
    report: &VerificationReport,
    tables: &[Table],
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(1 + tables.len());
    for table in tables {
        let path = dir.join(format!("{}.{}.csv", report.task_id, table.name()));
        std::fs::write(&path, table.to_csv())?;
        written.push(path);
    }
    let path = dir.join(report.file_name());
    std::fs::write(&path, report.to_json())?;
    written.push(path);
    Ok(written)
}

/// Hex SHA-256 of a byte string (the config document, for provenance).
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}
