//! Random-effect estimators of arm means.
//!
//! Every arm mean is modelled as `mu_k = mu_0 + delta_k` with `delta_k` of
//! variance `sigma0_sq`, and every reward as `mu_k` plus noise of variance
//! `sigma_sq`. From per-arm sufficient statistics this module computes
//!
//! ```text
//!   w_k    = sigma0_sq / (sigma0_sq + sigma_sq / n_k)            shrinkage weight
//!   mu~_k  = (1 - w_k) mu_0 + w_k rbar_k                         BLUP, mu_0 known
//!   rbar_0 = sum_k g_k rbar_k / sum_k g_k,  g_k = (1 - w_k) n_k  GLS common mean
//!   mu^_k  = (1 - w_k) rbar_0 + w_k rbar_k                       synthetic estimator
//!   tau_k2 = w_k sigma_sq / n_k + (1 - w_k)^2 sigma_sq / sum_i g_i
//! ```
//!
//! together with method-of-moments estimates of both variance components.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floor applied to an estimated prior variance so that every weight stays positive.
pub const PRIOR_VARIANCE_FLOOR: f64 = 1e-8;
/// Floor applied to an estimated reward variance so that exploration bonuses stay positive.
pub const REWARD_VARIANCE_FLOOR: f64 = 1e-12;

/// Sufficient statistics of the rewards observed on one arm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmStats {
    pub pulls: u64,
    pub reward_sum: f64,
    pub reward_sumsq: f64,
}

impl ArmStats {
    pub fn new(pulls: u64, reward_sum: f64, reward_sumsq: f64) -> Self {
        Self {
            pulls,
            reward_sum,
            reward_sumsq,
        }
    }

    pub fn from_rewards(rewards: &[f64]) -> Self {
        rewards.iter().fold(Self::default(), |s, &r| s.updated(r))
    }

    /// Records one more reward.
    pub fn update(&mut self, reward: f64) {
        self.pulls += 1;
        self.reward_sum += reward;
        self.reward_sumsq += reward * reward;
    }

    pub fn updated(mut self, reward: f64) -> Self {
        self.update(reward);
        self
    }

    /// Within-arm sum of squared deviations from the arm mean.
    ///
    /// Results within the rounding error of the two accumulated sums are
    /// reported as exactly zero.
    pub fn centered_sumsq(&self) -> f64 {
        if self.pulls == 0 {
            return 0.0;
        }
        let n = self.pulls as f64;
        let ss = self.reward_sumsq - self.reward_sum * self.reward_sum / n;
        if ss <= 4.0 * n * f64::EPSILON * self.reward_sumsq {
            0.0
        } else {
            ss
        }
    }

    /// Checks the representation invariants (empty arm is all zeros; Cauchy-Schwarz).
    pub fn is_consistent(&self) -> bool {
        if self.pulls == 0 {
            return self.reward_sum == 0.0 && self.reward_sumsq == 0.0;
        }
        let tol = 1e-9 * self.reward_sumsq.max(1.0);
        self.reward_sumsq + tol >= self.reward_sum * self.reward_sum / self.pulls as f64
    }
}

/// The direct estimator `rbar_k` of one arm.
pub fn sample_mean(stats: &ArmStats) -> Result<f64> {
    if stats.pulls == 0 {
        return Err(Error::domain("arm never pulled"));
    }
    Ok(stats.reward_sum / stats.pulls as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceSource {
    Known,
    Estimated,
}

/// Prior variance `sigma0_sq` of the arm means and reward-noise variance `sigma_sq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceParams {
    pub sigma0_sq: f64,
    pub sigma_sq: f64,
    pub source: VarianceSource,
}

impl VarianceParams {
    pub fn known(sigma0_sq: f64, sigma_sq: f64) -> Result<Self> {
        let params = Self {
            sigma0_sq,
            sigma_sq,
            source: VarianceSource::Known,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma0_sq.is_finite() && self.sigma0_sq > 0.0) {
            return Err(Error::domain(format!(
                "prior variance must be positive and finite, got {}",
                self.sigma0_sq
            )));
        }
        if !(self.sigma_sq.is_finite() && self.sigma_sq >= 0.0) {
            return Err(Error::domain(format!(
                "reward variance must be non-negative and finite, got {}",
                self.sigma_sq
            )));
        }
        Ok(())
    }
}

/// Everything the estimator stack produces for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkageEstimate {
    pub weights: Vec<f64>,
    pub common_mean: f64,
    pub synthetic_means: Vec<f64>,
    pub synthetic_vars: Vec<f64>,
    pub known_mean_means: Option<Vec<f64>>,
    pub known_mean_vars: Option<Vec<f64>>,
    pub mu0_known: Option<f64>,
}

fn require_pulls(pulls: u64) -> Result<f64> {
    if pulls == 0 {
        return Err(Error::domain("shrinkage weight needs at least one pull"));
    }
    Ok(pulls as f64)
}

/// `1 - w_k`, computed without cancellation.
fn complement_weight(n: f64, params: &VarianceParams) -> f64 {
    let noise = params.sigma_sq / n;
    noise / (params.sigma0_sq + noise)
}

/// Shrinkage weight `w_k = sigma0_sq / (sigma0_sq + sigma_sq / n_k)`.
pub fn shrinkage_weight(pulls: u64, params: &VarianceParams) -> Result<f64> {
    let n = require_pulls(pulls)?;
    Ok(params.sigma0_sq / (params.sigma0_sq + params.sigma_sq / n))
}

/// BLUP of an arm mean when the common mean `mu0` is known; returns `(mean, variance)`.
pub fn blup_known_mean(mu0: f64, stats: &ArmStats, params: &VarianceParams) -> Result<(f64, f64)> {
    let w = shrinkage_weight(stats.pulls, params)?;
    let rbar = sample_mean(stats)?;
    let n = stats.pulls as f64;
    let mean = (1.0 - w) * mu0 + w * rbar;
    Ok((mean, w * params.sigma_sq / n))
}

fn require_all_pulled(all_stats: &[ArmStats]) -> Result<()> {
    if all_stats.is_empty() {
        return Err(Error::domain("no arms"));
    }
    match all_stats.iter().position(|s| s.pulls == 0) {
        Some(k) => Err(Error::ArmNeverPulled(k)),
        None => Ok(()),
    }
}

/// GLS weights `g_k = (1 - w_k) n_k = sigma_sq / (sigma0_sq + sigma_sq / n_k)`.
fn gls_weights(all_stats: &[ArmStats], params: &VarianceParams) -> Vec<f64> {
    all_stats
        .iter()
        .map(|s| params.sigma_sq / (params.sigma0_sq + params.sigma_sq / s.pulls as f64))
        .collect()
}

fn common_mean_from(all_stats: &[ArmStats], gls: &[f64]) -> f64 {
    let total: f64 = gls.iter().sum();
    if total > 0.0 {
        all_stats
            .iter()
            .zip(gls)
            .map(|(s, g)| g * s.reward_sum / s.pulls as f64)
            .sum::<f64>()
            / total
    } else {
        // sigma_sq = 0: every GLS weight vanishes, use the unweighted mean.
        all_stats
            .iter()
            .map(|s| s.reward_sum / s.pulls as f64)
            .sum::<f64>()
            / all_stats.len() as f64
    }
}

/// Generalized least squares estimate `rbar_0` of the common mean.
pub fn gls_common_mean(all_stats: &[ArmStats], params: &VarianceParams) -> Result<f64> {
    require_all_pulled(all_stats)?;
    Ok(common_mean_from(all_stats, &gls_weights(all_stats, params)))
}

/// Synthetic estimator: the BLUP with `rbar_0` substituted for the unknown common mean.
pub fn synthetic_estimate(
    all_stats: &[ArmStats],
    params: &VarianceParams,
) -> Result<ShrinkageEstimate> {
    require_all_pulled(all_stats)?;
    let gls = gls_weights(all_stats, params);
    let gls_total: f64 = gls.iter().sum();
    let common_mean = common_mean_from(all_stats, &gls);

    let k = all_stats.len();
    let mut weights = Vec::with_capacity(k);
    let mut means = Vec::with_capacity(k);
    let mut vars = Vec::with_capacity(k);
    for s in all_stats {
        let n = s.pulls as f64;
        let rbar = s.reward_sum / n;
        let w = params.sigma0_sq / (params.sigma0_sq + params.sigma_sq / n);
        let one_minus_w = complement_weight(n, params);
        let var = if params.sigma_sq > 0.0 {
            w * params.sigma_sq / n + one_minus_w * one_minus_w * params.sigma_sq / gls_total
        } else {
            0.0
        };
        weights.push(w);
        means.push(one_minus_w * common_mean + w * rbar);
        vars.push(var);
    }

    Ok(ShrinkageEstimate {
        weights,
        common_mean,
        synthetic_means: means,
        synthetic_vars: vars,
        known_mean_means: None,
        known_mean_vars: None,
        mu0_known: None,
    })
}

/// Synthetic estimate plus the known-`mu0` BLUP counterparts.
pub fn synthetic_estimate_with_known_mean(
    all_stats: &[ArmStats],
    params: &VarianceParams,
    mu0: f64,
) -> Result<ShrinkageEstimate> {
    let mut est = synthetic_estimate(all_stats, params)?;
    let (means, vars): (Vec<f64>, Vec<f64>) = all_stats
        .iter()
        .map(|s| blup_known_mean(mu0, s, params))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    est.known_mean_means = Some(means);
    est.known_mean_vars = Some(vars);
    est.mu0_known = Some(mu0);
    Ok(est)
}

/// Pooled within-arm estimate of the reward variance.
pub fn estimate_reward_variance(all_stats: &[ArmStats]) -> Result<f64> {
    let dof: u64 = all_stats.iter().map(|s| s.pulls.saturating_sub(1)).sum();
    if dof == 0 {
        return Err(Error::InsufficientData("no arm has been pulled twice"));
    }
    let ss: f64 = all_stats.iter().map(ArmStats::centered_sumsq).sum();
    Ok((ss / dof as f64).max(0.0))
}

/// Method-of-moments estimate of the prior variance of the arm means.
///
/// Weighted squared deviations of the arm means from the pooled grand mean,
/// normalized by `n* = N - sum n_k^2 / N`. No within-arm noise correction is
/// applied, so under balanced allocation the expectation is
/// `sigma0_sq + sigma_sq / n`.
pub fn estimate_prior_variance(all_stats: &[ArmStats]) -> Result<f64> {
    if all_stats.len() < 2 {
        return Err(Error::InsufficientData("need at least two arms"));
    }
    if all_stats.iter().any(|s| s.pulls == 0) {
        return Err(Error::InsufficientData("every arm must be pulled"));
    }
    let total: f64 = all_stats.iter().map(|s| s.pulls as f64).sum();
    let sum_sq_pulls: f64 = all_stats.iter().map(|s| (s.pulls as f64).powi(2)).sum();
    let n_star = total - sum_sq_pulls / total;
    if n_star <= 0.0 {
        return Err(Error::InsufficientData("n* is not positive"));
    }
    let grand_mean = all_stats.iter().map(|s| s.reward_sum).sum::<f64>() / total;
    let weighted: f64 = all_stats
        .iter()
        .map(|s| {
            let n = s.pulls as f64;
            let u = s.reward_sum / n - grand_mean;
            n * u * u
        })
        .sum();
    Ok(weighted / n_star)
}

/// Values used while the variance components cannot be estimated yet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceDefaults {
    pub sigma0_sq: f64,
    pub sigma_sq: f64,
}

impl Default for VarianceDefaults {
    fn default() -> Self {
        Self {
            sigma0_sq: 1.0,
            sigma_sq: 1.0,
        }
    }
}

/// Estimates both variance components, falling back to `defaults` when data are
/// insufficient and clamping to the positivity floors.
pub fn estimate_variance_params(
    all_stats: &[ArmStats],
    defaults: &VarianceDefaults,
) -> VarianceParams {
    let sigma_sq = estimate_reward_variance(all_stats).unwrap_or(defaults.sigma_sq);
    let sigma0_sq = estimate_prior_variance(all_stats).unwrap_or(defaults.sigma0_sq);
    VarianceParams {
        sigma0_sq: sigma0_sq.max(PRIOR_VARIANCE_FLOOR),
        sigma_sq: sigma_sq.max(REWARD_VARIANCE_FLOOR),
        source: VarianceSource::Estimated,
    }
}
