//! File formats and persistence: matrix CSV, per-point report CSV, JSON
//! report, run manifest. Result files are written to a temporary sibling
//! and renamed into place, so a file either exists completely or not at
//! all.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use emi_core::experiments::ExperimentReport;
use emi_core::linalg::Matrix;

/// Reads a matrix from CSV: one row per channel use, comma-separated
/// columns, no header.
pub fn read_matrix_csv(path: &Path) -> Result<Matrix, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, String> = trimmed
            .split(',')
            .map(|field| {
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| format!("{}:{}: {e}", path.display(), lineno + 1))
            })
            .collect();
        rows.push(row?);
    }
    if rows.is_empty() {
        return Err(format!("{}: no data rows", path.display()));
    }
    Matrix::from_rows(rows).map_err(|e| format!("{}: {e}", path.display()))
}

/// 17-significant-digit scientific formatting; round-trips losslessly.
pub fn format_number(value: f64) -> String {
    if value.is_nan() {
        "nan".to_string()
    } else if value.is_infinite() {
        if value > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{value:.16e}")
    }
}

/// Renders the per-point CSV (deterministic for a fixed report).
pub fn report_to_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("point_id,T_or_R,empirical,ci_halfwidth,analytic_bound,verdict\n");
    for point in &report.points {
        let verdict = match point.verdict {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            point.point_id,
            format_number(point.x),
            format_number(point.empirical),
            format_number(point.ci_halfwidth),
            point.analytic.map(format_number).unwrap_or_default(),
            verdict
        ));
    }
    out
}

/// Provenance record written alongside every experiment's results.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_path: String,
    pub resolved_seed: u64,
    pub tool_version: String,
    pub started_unix_secs: f64,
    pub finished_unix_secs: f64,
    pub output_paths: Vec<String>,
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Write-then-rename so partially written result files never appear.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), String> {
    let tmp: PathBuf = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| format!("cannot write {}: {e}", tmp.display()))?;
    fs::rename(&tmp, path)
        .map_err(|e| format!("cannot move {} into place: {e}", path.display()))
}
