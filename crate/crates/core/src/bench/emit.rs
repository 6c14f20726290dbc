//! Report output: CSV file, aligned text table and JSON run metadata.

use std::collections::hash_map::DefaultHasher;
use std::fs::File;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::{BenchReport, BenchRow, BenchScenario, RowStatus};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 5] = ["N", "solver", "wall_s", "op_count", "err_inf"];

#[derive(Debug, Clone, Serialize)]
pub struct HostInfo {
    pub os: &'static str,
    pub arch: &'static str,
    pub cpus: usize,
}

impl HostInfo {
    pub fn current() -> Self {
        Self {
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
            cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub version: &'static str,
    pub seed: u64,
    pub config_hash: String,
    pub host: HostInfo,
    pub scenario: BenchScenario,
    /// Conditioning path of every solver present in the report.
    pub paths: Vec<(String, &'static str)>,
    /// `(N, rows)` extended by the reduced shift.
    pub extended_rows: Vec<(usize, usize)>,
}

impl RunMetadata {
    pub fn for_report(report: &BenchReport) -> Self {
        let mut paths: Vec<(String, &'static str)> = report
            .rows
            .iter()
            .map(|r| (r.solver.to_string(), r.path.as_str()))
            .collect();
        paths.sort();
        paths.dedup();
        Self {
            version: env!("CARGO_PKG_VERSION"),
            seed: report.scenario.seed,
            config_hash: config_hash(&report.scenario),
            host: HostInfo::current(),
            scenario: report.scenario.clone(),
            paths,
            extended_rows: report.extended_rows.clone(),
        }
    }
}

/// Hex digest of the scenario's JSON form.
pub fn config_hash(scenario: &BenchScenario) -> String {
    let json = serde_json::to_string(scenario).expect("scenario serializes");
    let mut h = DefaultHasher::new();
    json.hash(&mut h);
    format!("{:016x}", h.finish())
}

fn cells(row: &BenchRow) -> [String; 5] {
    [
        row.n.to_string(),
        row.solver.to_string(),
        row.wall_s.map(|s| format!("{s:.9}")).unwrap_or_default(),
        row.op_count.map(|c| c.to_string()).unwrap_or_default(),
        row.err_inf.map(|e| format!("{e:.6e}")).unwrap_or_default(),
    ]
}

fn status_text(status: &RowStatus) -> String {
    match status {
        RowStatus::Ok => "ok".into(),
        RowStatus::Skipped(why) => format!("skipped: {why}"),
        RowStatus::Failed(why) => format!("failed: {why}"),
    }
}

/// Aligned table with the CSV columns plus conditioning path and status.
pub fn format_table(rows: &[BenchRow]) -> String {
    let header: Vec<String> = CSV_HEADER
        .iter()
        .map(|s| s.to_string())
        .chain(["path".to_string(), "status".to_string()])
        .collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut line = cells(r).to_vec();
            line.push(r.path.as_str().to_string());
            line.push(status_text(&r.status));
            line
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| body.iter().map(|l| l[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for line in std::iter::once(&header).chain(&body) {
        let padded: Vec<String> = line.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Writes the CSV to `path`, the aligned table to `table`, and, when
/// `metadata` is given, the run metadata next to the CSV as `.json`.
pub fn emit(report: &BenchReport, path: &Path, table: &mut dyn Write, metadata: Option<&RunMetadata>) -> Result<()> {
    if report.rows.is_empty() {
        return Err(Error::Precondition("no benchmark rows to emit".into()));
    }
    let mut writer = csv::Writer::from_writer(File::create(path)?);
    writer.write_record(CSV_HEADER).map_err(csv_error)?;
    for row in &report.rows {
        writer.write_record(cells(row)).map_err(csv_error)?;
    }
    writer.flush()?;
    table.write_all(format_table(&report.rows).as_bytes())?;
    if let Some(meta) = metadata {
        let json = serde_json::to_string_pretty(meta).map_err(|e| Error::Io(e.into()))?;
        std::fs::write(path.with_extension("json"), json)?;
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.into())
}
