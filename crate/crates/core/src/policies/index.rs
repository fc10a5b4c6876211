//! Deterministic UCB-style indices.

use crate::error::Result;
use crate::estimators::{
    blup_known_mean, sample_mean, synthetic_estimate, ArmStats, VarianceParams,
};

fn log_round(t: u64) -> f64 {
    (t.max(1) as f64).ln()
}

/// ReUCB index `mu^_k + sqrt(a tau_k^2 log t)`.
///
/// With `known_mu0` the known-mean BLUP and its variance replace the
/// synthetic estimator.
pub fn reucb_index(
    stats: &[ArmStats],
    t: u64,
    params: &VarianceParams,
    a: f64,
    known_mu0: Option<f64>,
) -> Result<Vec<f64>> {
    let log_t = log_round(t);
    let (means, vars) = match known_mu0 {
        Some(mu0) => stats
            .iter()
            .map(|s| blup_known_mean(mu0, s, params))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip(),
        None => {
            let est = synthetic_estimate(stats, params)?;
            (est.synthetic_means, est.synthetic_vars)
        }
    };
    Ok(means
        .iter()
        .zip(&vars)
        .map(|(m, v)| m + (a * v * log_t).sqrt())
        .collect())
}

/// `rbar_k + sqrt(scale * log_t / n_k)`.
pub(crate) fn direct_ucb(stats: &[ArmStats], log_t: f64, scale: f64) -> Result<Vec<f64>> {
    stats
        .iter()
        .map(|s| Ok(sample_mean(s)? + (scale * log_t / s.pulls as f64).sqrt()))
        .collect()
}

/// UCB1 generalized to `sigma_sq`-sub-Gaussian rewards: `rbar_k + sqrt(8 sigma_sq log t / n_k)`.
pub fn ucb1_index(stats: &[ArmStats], t: u64, sigma_sq: f64) -> Result<Vec<f64>> {
    direct_ucb(stats, log_round(t), 8.0 * sigma_sq)
}

/// ReUCB with every weight forced to one: `rbar_k + sqrt(sigma_sq log t / n_k)`.
pub fn reucb_inf_index(stats: &[ArmStats], t: u64, sigma_sq: f64) -> Result<Vec<f64>> {
    direct_ucb(stats, log_round(t), sigma_sq)
}
