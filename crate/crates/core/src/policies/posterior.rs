//! Conjugate-posterior policies: Thompson sampling and Bayes-UCB.

use rand::Rng;
use rand_distr::{Beta as BetaDist, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::estimators::ArmStats;

/// Largest quantile level Bayes-UCB will ask for.
pub const MAX_QUANTILE_LEVEL: f64 = 1.0 - 1e-12;

/// Prior of a conjugate model, used by Bayes-UCB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ConjugatePrior {
    Gaussian {
        mu0: f64,
        sigma0_sq: f64,
        sigma_sq: f64,
    },
    Beta {
        alpha: f64,
        beta: f64,
    },
}

/// Mean and variance of the Gaussian posterior of one arm mean.
pub fn gaussian_posterior(stats: &ArmStats, mu0: f64, sigma0_sq: f64, sigma_sq: f64) -> (f64, f64) {
    if stats.pulls == 0 {
        return (mu0, sigma0_sq);
    }
    if sigma_sq == 0.0 {
        return (stats.reward_sum / stats.pulls as f64, 0.0);
    }
    let precision = 1.0 / sigma0_sq + stats.pulls as f64 / sigma_sq;
    let mean = (mu0 / sigma0_sq + stats.reward_sum / sigma_sq) / precision;
    (mean, 1.0 / precision)
}

/// Beta posterior parameters `(alpha + successes, beta + failures)`.
pub fn beta_posterior(stats: &ArmStats, alpha: f64, beta: f64) -> (f64, f64) {
    let successes = stats.reward_sum;
    let failures = stats.pulls as f64 - successes;
    (alpha + successes, beta + failures)
}

/// One posterior draw per arm from the Gaussian model.
pub fn gaussian_ts_sample<R: Rng + ?Sized>(
    stats: &[ArmStats],
    mu0: f64,
    sigma0_sq: f64,
    sigma_sq: f64,
    rng: &mut R,
) -> Vec<f64> {
    stats
        .iter()
        .map(|s| {
            let (mean, var) = gaussian_posterior(s, mu0, sigma0_sq, sigma_sq);
            let z: f64 = StandardNormal.sample(rng);
            mean + var.sqrt() * z
        })
        .collect()
}

/// One posterior draw per arm from the Beta-Bernoulli model.
pub fn bernoulli_ts_sample<R: Rng + ?Sized>(
    stats: &[ArmStats],
    alpha: f64,
    beta: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    stats
        .iter()
        .map(|s| {
            let (a, b) = beta_posterior(s, alpha, beta);
            let dist =
                BetaDist::new(a, b).map_err(|e| Error::domain(format!("Beta({a}, {b}): {e}")))?;
            Ok(dist.sample(rng))
        })
        .collect()
}

/// Quantile level `1 - 1 / (t (log horizon)^c)`, clamped below one.
pub fn bayes_ucb_level(t: u64, horizon: u64, c: f64) -> f64 {
    let level = 1.0 - 1.0 / (t as f64 * (horizon as f64).ln().powf(c));
    if level > 0.0 && level < MAX_QUANTILE_LEVEL {
        level
    } else {
        MAX_QUANTILE_LEVEL
    }
}

/// Quantile of one arm's posterior.
pub fn posterior_quantile(stats: &ArmStats, prior: &ConjugatePrior, level: f64) -> Result<f64> {
    match *prior {
        ConjugatePrior::Gaussian {
            mu0,
            sigma0_sq,
            sigma_sq,
        } => {
            let (mean, var) = gaussian_posterior(stats, mu0, sigma0_sq, sigma_sq);
            if var == 0.0 {
                return Ok(mean);
            }
            let z = Normal::standard().inverse_cdf(level);
            Ok(mean + var.sqrt() * z)
        }
        ConjugatePrior::Beta { alpha, beta } => {
            let (a, b) = beta_posterior(stats, alpha, beta);
            let dist =
                Beta::new(a, b).map_err(|e| Error::domain(format!("Beta({a}, {b}): {e}")))?;
            Ok(dist.inverse_cdf(level))
        }
    }
}

/// Bayes-UCB index: a high posterior quantile of every arm.
pub fn bayes_ucb_index(
    stats: &[ArmStats],
    prior: &ConjugatePrior,
    t: u64,
    horizon: u64,
    c: f64,
) -> Result<Vec<f64>> {
    let level = bayes_ucb_level(t, horizon, c);
    stats
        .iter()
        .map(|s| posterior_quantile(s, prior, level))
        .collect()
}
