use std::fs;
use std::path::Path;

use serde::Serialize;

use super::history::RunStatus;
use super::run::RunResult;
use super::{HarnessError, Result};
use crate::metrics::mode_coverage;
use crate::numerics::DenseMatrix;

/// Radius used for the per-mode coverage diagnostic written to `run.json`.
const COVERAGE_RADIUS: f64 = 0.1;

#[derive(Serialize)]
struct RunDocument<'a> {
    config: &'a super::RunSpec,
    #[serde(flatten)]
    status: &'a RunStatus,
    iterations_run: u64,
    initial_w22: Option<f64>,
    final_w22: Option<f64>,
    best_w22: Option<f64>,
    events: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    mode_coverage: Option<Vec<f64>>,
    checkpoint: &'a str,
}

/// Write `history.csv`, `samples_final.csv`, `generator.json` and `run.json`
/// into `outdir` (created if needed).
pub fn write_run_outputs(outdir: &Path, result: &RunResult) -> Result<std::path::PathBuf> {
    fs::create_dir_all(outdir).map_err(|e| io_err("create output directory", e))?;

    fs::write(outdir.join("history.csv"), result.history.to_csv())
        .map_err(|e| io_err("write history.csv", e))?;

    let samples = result.final_samples();
    fs::write(outdir.join("samples_final.csv"), samples_csv(&samples))
        .map_err(|e| io_err("write samples_final.csv", e))?;

    let checkpoint = "generator.json";
    fs::write(outdir.join(checkpoint), result.generator.to_json())
        .map_err(|e| io_err("write generator.json", e))?;

    let coverage = if result.spec.target.is_unimodal_gaussian() {
        None
    } else {
        Some(mode_coverage(&samples, &result.spec.target.mode_means(), COVERAGE_RADIUS))
    };
    let doc = RunDocument {
        config: &result.spec,
        status: &result.history.status,
        iterations_run: result.history.records.last().map_or(0, |r| r.iteration),
        initial_w22: result.history.initial_w22(),
        final_w22: result.history.final_w22(),
        best_w22: result.history.best_w22(),
        events: &result.history.events,
        mode_coverage: coverage,
        checkpoint,
    };
    let text = serde_json::to_string_pretty(&doc).expect("run document serializes");
    let path = outdir.join("run.json");
    fs::write(&path, text).map_err(|e| io_err("write run.json", e))?;
    Ok(path)
}

/// One generated point per row, comma-separated coordinates, no header.
pub fn samples_csv(samples: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..samples.rows() {
        let row = samples.row(i);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    out
}

fn io_err(context: &str, e: std::io::Error) -> HarnessError {
    HarnessError::Io(format!("{context}: {e}"))
}
