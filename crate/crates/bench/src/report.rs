use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl FromStr for TableFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "md" | "markdown" => Ok(TableFormat::Markdown),
            other => Err(BenchError::Table(format!("unknown format `{other}` (expected csv or md)"))),
        }
    }
}

/// One order `m` of a convergence run. `error` is `None` when the solve did
/// not converge; `interior` is only set for boundary problems.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub m: usize,
    pub error: Option<f64>,
    pub interior: Option<f64>,
    pub iterations: Option<usize>,
    pub eoc: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportMetadata {
    pub example: String,
    pub seed: u64,
    pub q: Option<f64>,
    /// `exact` or `f_<m>` for a self-referenced run.
    pub reference: String,
    /// Number of interior evaluation points and their minimum distance to
    /// the boundary, for boundary problems.
    pub interior_points: Option<(usize, f64)>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub metadata: ReportMetadata,
    pub boundary: bool,
    pub rows: Vec<ReportRow>,
}

impl ConvergenceReport {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    pub fn row(&self, m: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.m == m)
    }
}

/// Three significant digits with a signed two-digit exponent, `4.90e-16`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.2e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn cell(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), format_sci)
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRecord {
    m: usize,
    converged: bool,
    error: Option<f64>,
    error_sci: String,
    interior: Option<f64>,
    interior_sci: String,
    iterations: Option<usize>,
    eoc: Option<f64>,
    eoc_sci: String,
}

/// Renders the rows of `report`. Markdown has the columns m, error,
/// iterations and EOC (boundary problems split the error into boundary and
/// interior); CSV carries full-precision values next to the formatted ones.
/// Non-converged rows show `n/c` in the error column.
pub fn emit_table(report: &ConvergenceReport, format: TableFormat) -> String {
    match format {
        TableFormat::Markdown => emit_markdown(report),
        TableFormat::Csv => emit_csv(report),
    }
}

fn emit_markdown(report: &ConvergenceReport) -> String {
    let mut out = String::new();
    if report.boundary {
        out.push_str("| m | boundary error | interior error | iterations | EOC |\n");
        out.push_str("|---|---|---|---|---|\n");
    } else {
        out.push_str("| m | error | iterations | EOC |\n");
        out.push_str("|---|---|---|---|\n");
    }
    for r in &report.rows {
        let error = if r.converged { cell(r.error) } else { "n/c".to_string() };
        let iterations = r.iterations.map_or_else(|| "-".to_string(), |n| n.to_string());
        if report.boundary {
            let interior = if r.converged { cell(r.interior) } else { "n/c".to_string() };
            writeln!(out, "| {} | {error} | {interior} | {iterations} | {} |", r.m, cell(r.eoc)).unwrap();
        } else {
            writeln!(out, "| {} | {error} | {iterations} | {} |", r.m, cell(r.eoc)).unwrap();
        }
    }
    out
}

fn emit_csv(report: &ConvergenceReport) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    if report.rows.is_empty() {
        writer
            .write_record([
                "m", "converged", "error", "error_sci", "interior", "interior_sci", "iterations", "eoc", "eoc_sci",
            ])
            .expect("writing to memory");
    }
    for r in &report.rows {
        let opt_sci = |x: Option<f64>| x.map(format_sci).unwrap_or_default();
        writer
            .serialize(CsvRecord {
                m: r.m,
                converged: r.converged,
                error: r.error,
                error_sci: opt_sci(r.error),
                interior: r.interior,
                interior_sci: opt_sci(r.interior),
                iterations: r.iterations,
                eoc: r.eoc,
                eoc_sci: opt_sci(r.eoc),
            })
            .expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
}

/// Rows of a table produced by [`emit_table`] in CSV format.
pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize::<CsvRecord>()
        .map(|rec| {
            let rec = rec?;
            Ok(ReportRow {
                m: rec.m,
                error: rec.error,
                interior: rec.interior,
                iterations: rec.iterations,
                eoc: rec.eoc,
                converged: rec.converged,
            })
        })
        .collect()
}

/// One-line summary of the run metadata, for logs.
pub fn describe_metadata(meta: &ReportMetadata) -> String {
    let q = meta.q.map_or_else(|| "-".to_string(), |q| q.to_string());
    let mut s = format!("example={} q={q} seed={} reference={}", meta.example, meta.seed, meta.reference);
    if let Some((n, band)) = meta.interior_points {
        write!(s, " interior_points={n} band={band}").unwrap();
    }
    write!(s, " wall_time={:.3}s", meta.wall_time.as_secs_f64()).unwrap();
    s
}
