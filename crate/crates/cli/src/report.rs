//! The report envelope and its JSON, CSV and table renderings.

use std::io::Write;
use std::path::Path;

use hh_core::quad::QuadResult;
use serde::{Deserialize, Serialize};

use crate::config::ResolvedConfig;
use crate::error::{CliError, Result};

pub const REPORT_SCHEMA: &str = include_str!("../../../docs/report.schema.json");
pub const TOOL: &str = "hh";

/// Overall verdict of a run, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok,
    CheckFailed,
    Divergence,
    Precondition,
    Io,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Io => 1,
            Outcome::CheckFailed => 2,
            Outcome::Precondition => 3,
            Outcome::Divergence => 4,
        }
    }

    pub fn from_exit_code(code: u8) -> Self {
        match code {
            0 => Outcome::Ok,
            1 => Outcome::Io,
            2 => Outcome::CheckFailed,
            4 => Outcome::Divergence,
            _ => Outcome::Precondition,
        }
    }

    pub fn worst(self, other: Outcome) -> Outcome {
        self.max(other)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Status {
    pub outcome: Outcome,
    pub exit_code: u8,
}

/// One labelled integral behind the numbers in `results`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub label: String,
    pub result: QuadResult,
}

impl Diagnostic {
    pub fn new(label: impl Into<String>, result: QuadResult) -> Self {
        Self { label: label.into(), result }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEntry {
    pub kind: String,
    pub message: String,
}

impl From<&CliError> for ErrorEntry {
    fn from(e: &CliError) -> Self {
        Self { kind: e.kind().into(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub timestamp: String,
    /// The fully resolved config, absent only when the config itself was
    /// rejected.
    pub config: Option<ResolvedConfig>,
    pub status: Status,
    /// Command-specific payload; deterministic for a given config.
    pub results: Option<serde_json::Value>,
    pub diagnostics: Vec<Diagnostic>,
    pub errors: Vec<ErrorEntry>,
}

impl ReportEnvelope {
    pub fn new(command: &str, config: Option<ResolvedConfig>) -> Self {
        Self {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            config,
            status: Status { outcome: Outcome::Ok, exit_code: 0 },
            results: None,
            diagnostics: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn set_outcome(&mut self, outcome: Outcome) {
        self.status = Status { outcome, exit_code: outcome.exit_code() };
    }

    pub fn fail(&mut self, err: &CliError) {
        self.errors.push(err.into());
        self.set_outcome(Outcome::from_exit_code(err.exit_code()));
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| CliError::Write { target: "report".into(), message: e.to_string() })
    }
}

/// A flat table for CSV output and the human-readable summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, headers: &[&str]) -> Self {
        Self { title: title.into(), headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let to_err = |e: csv::Error| CliError::Write { target: "csv".into(), message: e.to_string() };
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers).map_err(to_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(to_err)?;
        }
        w.flush().map_err(|e| CliError::Write { target: "csv".into(), message: e.to_string() })
    }

    /// Column-aligned plain text.
    pub fn render(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        if !self.title.is_empty() {
            out.push_str(&self.title);
            out.push('\n');
        }
        out.push_str(&line(&self.headers));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }
}

/// A number for tables. Unconverged values always carry a marker.
pub fn num(v: f64, converged: bool) -> String {
    let text = if v.is_finite() { format!("{v:.12e}") } else { v.to_string() };
    if converged {
        text
    } else {
        format!("{text} (converged=false)")
    }
}

pub fn flag(b: bool) -> String {
    if b { "yes" } else { "no" }.into()
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|e| CliError::Write { target: p.display().to_string(), message: e.to_string() })?;
            let mut buf = std::io::BufWriter::new(file);
            write(&mut buf)?;
            buf.flush().map_err(|e| CliError::Write { target: p.display().to_string(), message: e.to_string() })
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush().map_err(|e| CliError::Write { target: "stdout".into(), message: e.to_string() })
        }
    }
}
