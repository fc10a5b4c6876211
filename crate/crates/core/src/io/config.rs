//! Experiment configuration files.
//!
//! One experiment per TOML file:
//!
//! ```toml
//! name = "fig1a"
//! arms = 50
//! horizon = 10000
//! runs = 1000
//! seed = 1
//! # out = "results/fig1a"      optional output directory
//! # fixed_instance = false     optional; reuse one instance for every run
//!
//! [prior]
//! kind = "gaussian"            # gaussian | uniform | beta | explicit
//! mean = 1.0
//! variance = 0.04
//!
//! [reward]
//! kind = "gaussian"            # gaussian | bernoulli | truncated-gaussian | hetero-gaussian
//! variance = 0.25
//!
//! [[policy]]
//! label = "ReUCB"
//! kind = "reucb"               # see `rebandit list-policies`
//! ```
//!
//! Unknown keys anywhere in the file are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::environments::{PriorSpec, RewardSpec};
use crate::error::{Error, Result};
use crate::harness::Experiment;
use crate::policies::{PolicyConfig, PolicyKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub experiment: Experiment,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: String,
    arms: usize,
    horizon: u64,
    runs: u64,
    seed: u64,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default)]
    fixed_instance: bool,
    prior: PriorSpec,
    reward: RewardSpec,
    #[serde(default)]
    policy: Vec<toml::Table>,
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn parse_error(path: &Path, text: &str, err: &toml::de::Error) -> Error {
    let (row, column) = err.span().map_or((0, 0), |s| line_col(text, s.start));
    Error::Parse {
        path: path.to_path_buf(),
        row,
        column,
        message: err.message().to_string(),
    }
}

fn parse_policy(index: usize, mut table: toml::Table) -> Result<PolicyConfig> {
    let label = match table.remove("label") {
        Some(toml::Value::String(s)) => s,
        Some(other) => {
            return Err(Error::config(format!(
                "policy #{}: label must be a string, got {other}",
                index + 1
            )))
        }
        None => {
            return Err(Error::config(format!(
                "policy #{}: missing field `label`",
                index + 1
            )))
        }
    };
    let extra: Vec<&String> = table.keys().filter(|k| *k != "kind").collect();
    let kind = PolicyKind::deserialize(toml::Value::Table(table.clone()))
        .map_err(|e| Error::config(format!("policy {label:?}: {}", e.message())))?;
    // Unit variants of an internally tagged enum accept stray keys; reject them here.
    if kind == PolicyKind::KlUcb && !extra.is_empty() {
        return Err(Error::config(format!(
            "policy {label:?}: unknown field `{}`",
            extra[0]
        )));
    }
    Ok(PolicyConfig { label, kind })
}

/// Parses a configuration from text; `path` is used for diagnostics only.
pub fn parse_config(text: &str, path: &Path) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| parse_error(path, text, &e))?;
    let policies = raw
        .policy
        .into_iter()
        .enumerate()
        .map(|(i, t)| parse_policy(i, t))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    let config = ExperimentConfig {
        name: raw.name,
        experiment: Experiment {
            prior: raw.prior,
            reward: raw.reward,
            arms: raw.arms,
            horizon: raw.horizon,
            runs: raw.runs,
            base_seed: raw.seed,
            policies,
            fixed_instance: raw.fixed_instance,
        },
        out_dir: raw.out,
    };
    config.validate().map_err(|e| Error::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(config)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        if self.name.trim().is_empty() {
            return Err(Error::config("name must not be empty"));
        }
        if e.arms < 2 {
            return Err(Error::config(format!(
                "arms must be at least 2, got {}",
                e.arms
            )));
        }
        if e.horizon < e.arms as u64 {
            return Err(Error::config(format!(
                "horizon {} must be at least the number of arms {}",
                e.horizon, e.arms
            )));
        }
        if e.runs == 0 {
            return Err(Error::config("runs must be at least 1"));
        }
        if e.policies.is_empty() {
            return Err(Error::config("at least one [[policy]] is required"));
        }
        e.prior.validate()?;
        e.reward.validate()?;
        if let PriorSpec::Explicit { means } = &e.prior {
            if means.len() != e.arms {
                return Err(Error::config(format!(
                    "explicit prior lists {} means for {} arms",
                    means.len(),
                    e.arms
                )));
            }
        }
        if let RewardSpec::HeteroGaussian { variances } = &e.reward {
            if variances.len() != e.arms {
                return Err(Error::config(format!(
                    "{} noise variances for {} arms",
                    variances.len(),
                    e.arms
                )));
            }
        }
        for (i, p) in e.policies.iter().enumerate() {
            p.validate()?;
            if e.policies[..i].iter().any(|q| q.label == p.label) {
                return Err(Error::config(format!(
                    "duplicate policy label {:?}",
                    p.label
                )));
            }
        }
        Ok(())
    }

    /// Output directory: the configured one, or `results/<name>`.
    pub fn output_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .unwrap_or_else(|| Path::new("results").join(&self.name))
    }
}
