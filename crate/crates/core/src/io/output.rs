//! Result files: `curves.csv`, `final.csv` and `meta.json`.
//!
//! Numbers use the shortest decimal form that parses back to the same `f64`,
//! so identical results always produce identical bytes.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::ExperimentResult;

pub const CURVES_FILE: &str = "curves.csv";
pub const FINAL_FILE: &str = "final.csv";
pub const META_FILE: &str = "meta.json";

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

/// One row per round: `round, <label>_mean, <label>_stderr, ...`.
pub fn write_curves(result: &ExperimentResult, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header = vec!["round".to_string()];
    for p in &result.policies {
        header.push(format!("{}_mean", p.label));
        header.push(format!("{}_stderr", p.label));
    }
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for t in 0..result.horizon as usize {
        let mut row = vec![(t + 1).to_string()];
        for p in &result.policies {
            row.push(p.aggregate.mean_cum_regret[t].to_string());
            row.push(p.aggregate.stderr_cum_regret[t].to_string());
        }
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per (policy, run): `policy, run, final_regret`.
pub fn write_finals(result: &ExperimentResult, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["policy", "run", "final_regret"])
        .map_err(|e| csv_err(path, e))?;
    for p in &result.policies {
        for (run, r) in p.aggregate.final_regret_samples.iter().enumerate() {
            w.write_record([p.label.as_str(), &run.to_string(), &r.to_string()])
                .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes all three files into `dir` (created if missing) and returns their paths.
pub fn write_results<M: Serialize>(
    result: &ExperimentResult,
    meta: &M,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    if result.policies.is_empty() || result.horizon == 0 {
        return Err(Error::domain(
            "nothing to write: no policies or zero horizon",
        ));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let curves = dir.join(CURVES_FILE);
    let finals = dir.join(FINAL_FILE);
    let meta_path = dir.join(META_FILE);
    write_curves(result, &curves)?;
    write_finals(result, &finals)?;
    let mut text = serde_json::to_string_pretty(meta)
        .map_err(|e| Error::io(&meta_path, std::io::Error::other(e)))?;
    text.push('\n');
    std::fs::write(&meta_path, text).map_err(|e| Error::io(&meta_path, e))?;
    Ok(vec![curves, finals, meta_path])
}
