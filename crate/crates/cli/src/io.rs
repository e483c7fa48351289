//! File formats: JSONL sequences and the CSV schemas.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a file back recovers bit-identical values and rerunning a command with
//! the same inputs rewrites the same bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dygad_core::experiments::{MethodSummary, RunRecord};
use dygad_core::pipeline::Diagnostics;
use dygad_core::{ExperimentId, FeatureMatrix, GraphSnapshot, FEATURE_NAMES};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// One snapshot per line: `{"t": <1-based>, "n": <vertices>, "edges": [[u, v], ...]}`.
#[derive(Serialize, Deserialize)]
struct SnapshotRecord {
    t: usize,
    n: usize,
    edges: Vec<(u32, u32)>,
}

pub fn write_sequence(path: &Path, graphs: &[GraphSnapshot]) -> Result<(), CliError> {
    let mut out = String::new();
    for (i, g) in graphs.iter().enumerate() {
        let record = SnapshotRecord {
            t: i + 1,
            n: g.num_vertices(),
            edges: g.edges().to_vec(),
        };
        let line = serde_json::to_string(&record)
            .map_err(|e| CliError::Runtime(format!("encoding snapshot {}: {e}", i + 1)))?;
        out.push_str(&line);
        out.push('\n');
    }
    write_file(path, &out)
}

pub fn read_sequence(path: &Path) -> Result<Vec<GraphSnapshot>, CliError> {
    let text = read_file(path)?;
    let mut graphs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: SnapshotRecord = serde_json::from_str(line).map_err(|e| {
            CliError::Runtime(format!("{}: line {}: {e}", path.display(), i + 1))
        })?;
        if record.t != graphs.len() + 1 {
            return Err(CliError::Runtime(format!(
                "{}: line {}: expected t={}, found t={}",
                path.display(),
                i + 1,
                graphs.len() + 1,
                record.t
            )));
        }
        let graph = GraphSnapshot::new(record.n, record.edges).map_err(|e| {
            CliError::Runtime(format!("{}: line {}: {e}", path.display(), i + 1))
        })?;
        graphs.push(graph);
    }
    Ok(graphs)
}

pub fn write_labels(path: &Path, labels: &[bool]) -> Result<(), CliError> {
    let mut out = String::from("t,label\n");
    for (i, &label) in labels.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, u8::from(label));
    }
    write_file(path, &out)
}

pub fn read_labels(path: &Path) -> Result<Vec<bool>, CliError> {
    let column = read_column(path, "label")?;
    column
        .iter()
        .enumerate()
        .map(|(i, value)| match value.as_str() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(CliError::Runtime(format!(
                "{}: row {}: label must be 0 or 1, found `{other}`",
                path.display(),
                i + 1
            ))),
        })
        .collect()
}

pub fn write_features(path: &Path, features: &FeatureMatrix) -> Result<(), CliError> {
    let mut out = String::from("t");
    for name in FEATURE_NAMES {
        let _ = write!(out, ",{name}");
    }
    out.push('\n');
    for (i, row) in features.rows().iter().enumerate() {
        let _ = write!(out, "{}", i + 1);
        for value in row.to_array() {
            let _ = write!(out, ",{value}");
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Scores schema shared by the proposed detector and the baselines:
/// `t,v,score,flagged`. Baselines rank but do not classify, so they repeat
/// their raw statistic in both value columns and never flag.
pub fn write_scores(
    path: &Path,
    v: &[f64],
    scores: &[f64],
    flagged: &[bool],
) -> Result<(), CliError> {
    let mut out = String::from("t,v,score,flagged\n");
    for i in 0..scores.len() {
        let _ = writeln!(out, "{},{},{},{}", i + 1, v[i], scores[i], flagged[i]);
    }
    write_file(path, &out)
}

pub fn read_scores(path: &Path) -> Result<Vec<f64>, CliError> {
    let column = read_column(path, "score")?;
    column
        .iter()
        .enumerate()
        .map(|(i, value)| {
            value.parse::<f64>().map_err(|_| {
                CliError::Runtime(format!(
                    "{}: row {}: `{value}` is not a number",
                    path.display(),
                    i + 1
                ))
            })
        })
        .collect()
}

/// Per-feature model rows followed by one tail row. Columns that do not
/// apply to a row kind are left empty.
pub fn write_diagnostics(path: &Path, diagnostics: &Diagnostics) -> Result<(), CliError> {
    let mut out = String::from(
        "record,feature,p,d,q,sigma2,aicc,fallback,u,k,sigma_u,xi,exponential_limit,degenerate\n",
    );
    for (name, model) in FEATURE_NAMES.iter().zip(&diagnostics.models) {
        let _ = writeln!(
            out,
            "arima,{name},{},{},{},{},{},{},,,,,,",
            model.order.p, model.order.d, model.order.q, model.sigma2, model.aicc, model.fallback
        );
    }
    let tail = &diagnostics.tail;
    let _ = writeln!(
        out,
        "gpd,,,,,,,,{},{},{},{},{},{}",
        tail.threshold, tail.num_exceedances, tail.sigma, tail.xi, tail.exponential_limit,
        tail.degenerate
    );
    write_file(path, &out)
}

pub fn write_results(path: &Path, experiment: ExperimentId, records: &[RunRecord]) -> Result<(), CliError> {
    let mut out = String::from("experiment,setting,seed,method,auc\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            experiment.index(),
            r.p_star,
            r.seed,
            r.method.name(),
            r.auc
        );
    }
    write_file(path, &out)
}

pub fn write_summary(
    path: &Path,
    experiment: ExperimentId,
    summaries: &[MethodSummary],
) -> Result<(), CliError> {
    let mut out = String::from("experiment,setting,method,min,q25,median,q75,max\n");
    for s in summaries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            experiment.index(),
            s.p_star,
            s.method.name(),
            s.stats.min,
            s.stats.q25,
            s.stats.median,
            s.stats.q75,
            s.stats.max
        );
    }
    write_file(path, &out)
}

/// Reads one named column from a CSV file with a header row.
fn read_column(path: &Path, name: &str) -> Result<Vec<String>, CliError> {
    let text = read_file(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Runtime(format!("{}: empty file", path.display())))?;
    let index = header
        .split(',')
        .position(|col| col == name)
        .ok_or_else(|| {
            CliError::Runtime(format!("{}: no `{name}` column in header", path.display()))
        })?;
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let field = line.split(',').nth(index).ok_or_else(|| {
            CliError::Runtime(format!("{}: row {}: too few columns", path.display(), i + 1))
        })?;
        values.push(field.to_string());
    }
    Ok(values)
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}
