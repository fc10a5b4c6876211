//! Sequential arm-selection policies.
//!
//! Every policy pulls arms `0..K` once, in order, during the first `K`
//! rounds. Afterwards it pulls the arm with the largest index (or posterior
//! sample), breaking ties towards the lowest arm index. Rounds are counted
//! from 1 and `log t` always uses the global round.

pub mod index;
pub mod klucb;
pub mod posterior;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{estimate_variance_params, ArmStats, VarianceDefaults, VarianceParams};

pub use index::{reucb_index, reucb_inf_index, ucb1_index};
pub use klucb::{bernoulli_kl, kl_ucb_bound, kl_ucb_index};
pub use posterior::{
    bayes_ucb_index, bernoulli_ts_sample, gaussian_posterior, gaussian_ts_sample, ConjugatePrior,
};

fn one() -> f64 {
    1.0
}

fn default_bayes_ucb_c() -> f64 {
    5.0
}

/// Which policy to run and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolicyKind {
    /// ReUCB with both variance components estimated every round.
    #[serde(rename = "reucb")]
    ReUcb {
        #[serde(default = "one")]
        a: f64,
        #[serde(default)]
        fallback: VarianceDefaults,
        #[serde(default)]
        known_mu0: Option<f64>,
    },
    /// ReUCB with known variance components.
    #[serde(rename = "reucb-star")]
    ReUcbStar {
        #[serde(default = "one")]
        a: f64,
        sigma0_sq: f64,
        sigma_sq: f64,
        #[serde(default)]
        known_mu0: Option<f64>,
    },
    /// ReUCB with all weights set to one.
    #[serde(rename = "reucb-inf")]
    ReUcbInf {
        sigma_sq: f64,
    },
    Ucb1 {
        sigma_sq: f64,
    },
    GaussianTs {
        mu0: f64,
        sigma0_sq: f64,
        sigma_sq: f64,
    },
    BernoulliTs {
        #[serde(default = "one")]
        alpha: f64,
        #[serde(default = "one")]
        beta: f64,
        /// Accept rewards in `[0, 1]`, counting them as fractional successes.
        #[serde(default)]
        fractional: bool,
    },
    BayesUcb {
        prior: ConjugatePrior,
        #[serde(default = "default_bayes_ucb_c")]
        c: f64,
    },
    KlUcb,
}

impl PolicyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::ReUcb { .. } => "reucb",
            PolicyKind::ReUcbStar { .. } => "reucb-star",
            PolicyKind::ReUcbInf { .. } => "reucb-inf",
            PolicyKind::Ucb1 { .. } => "ucb1",
            PolicyKind::GaussianTs { .. } => "gaussian-ts",
            PolicyKind::BernoulliTs { .. } => "bernoulli-ts",
            PolicyKind::BayesUcb { .. } => "bayes-ucb",
            PolicyKind::KlUcb => "kl-ucb",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(
            self,
            PolicyKind::GaussianTs { .. } | PolicyKind::BernoulliTs { .. }
        )
    }
}

/// A labelled policy. The label names the policy in outputs and seeds its random streams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub label: String,
    pub kind: PolicyKind,
}

impl PolicyConfig {
    pub fn new(label: impl Into<String>, kind: PolicyKind) -> Self {
        Self {
            label: label.into(),
            kind,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::config(format!("policy {}: {what}", self.label)));
        let positive = |x: f64| x.is_finite() && x > 0.0;
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if self.label.is_empty() {
            return Err(Error::config("policy label must not be empty"));
        }
        match &self.kind {
            PolicyKind::ReUcb { a, fallback, .. } => {
                if !positive(*a) {
                    return bad("bonus multiplier a must be positive");
                }
                if !positive(fallback.sigma0_sq) || !nonneg(fallback.sigma_sq) {
                    return bad("fallback variances must be valid");
                }
            }
            PolicyKind::ReUcbStar {
                a,
                sigma0_sq,
                sigma_sq,
                ..
            } => {
                if !positive(*a) {
                    return bad("bonus multiplier a must be positive");
                }
                VarianceParams::known(*sigma0_sq, *sigma_sq)?;
            }
            PolicyKind::ReUcbInf { sigma_sq } | PolicyKind::Ucb1 { sigma_sq } => {
                if !nonneg(*sigma_sq) {
                    return bad("sigma_sq must be non-negative");
                }
            }
            PolicyKind::GaussianTs {
                mu0,
                sigma0_sq,
                sigma_sq,
            } => {
                if !mu0.is_finite() || !positive(*sigma0_sq) || !nonneg(*sigma_sq) {
                    return bad("invalid Gaussian prior");
                }
            }
            PolicyKind::BernoulliTs { alpha, beta, .. } => {
                if !positive(*alpha) || !positive(*beta) {
                    return bad("Beta prior parameters must be positive");
                }
            }
            PolicyKind::BayesUcb { prior, c } => {
                if !c.is_finite() || *c < 0.0 {
                    return bad("c must be non-negative");
                }
                match *prior {
                    ConjugatePrior::Gaussian {
                        sigma0_sq,
                        sigma_sq,
                        ..
                    } => {
                        if !positive(sigma0_sq) || !nonneg(sigma_sq) {
                            return bad("invalid Gaussian prior");
                        }
                    }
                    ConjugatePrior::Beta { alpha, beta } => {
                        if !positive(alpha) || !positive(beta) {
                            return bad("Beta prior parameters must be positive");
                        }
                    }
                }
            }
            PolicyKind::KlUcb => {}
        }
        Ok(())
    }
}

/// History of one episode in sufficient-statistic form.
#[derive(Debug, Clone)]
pub struct PolicyState {
    pub arm_stats: Vec<ArmStats>,
    /// The round about to be played, starting at 1.
    pub round: u64,
    pub horizon: u64,
    pub rng: ChaCha8Rng,
}

impl PolicyState {
    pub fn new(arms: usize, horizon: u64, rng: ChaCha8Rng) -> Self {
        Self {
            arm_stats: vec![ArmStats::default(); arms],
            round: 1,
            horizon,
            rng,
        }
    }

    pub fn seeded(arms: usize, horizon: u64, seed: u64) -> Self {
        Self::new(arms, horizon, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn arms(&self) -> usize {
        self.arm_stats.len()
    }
}

/// Index of the largest value; ties and NaNs resolve towards the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] || (values[best].is_nan() && !v.is_nan()) {
            best = k;
        }
    }
    best
}

/// Per-arm scores the policy maximizes in the current round.
pub fn policy_scores(kind: &PolicyKind, state: &mut PolicyState) -> Result<Vec<f64>> {
    let t = state.round;
    let stats = &state.arm_stats;
    match kind {
        PolicyKind::ReUcb {
            a,
            fallback,
            known_mu0,
        } => {
            let params = estimate_variance_params(stats, fallback);
            reucb_index(stats, t, &params, *a, *known_mu0)
        }
        PolicyKind::ReUcbStar {
            a,
            sigma0_sq,
            sigma_sq,
            known_mu0,
        } => {
            let params = VarianceParams::known(*sigma0_sq, *sigma_sq)?;
            reucb_index(stats, t, &params, *a, *known_mu0)
        }
        PolicyKind::ReUcbInf { sigma_sq } => reucb_inf_index(stats, t, *sigma_sq),
        PolicyKind::Ucb1 { sigma_sq } => ucb1_index(stats, t, *sigma_sq),
        PolicyKind::GaussianTs {
            mu0,
            sigma0_sq,
            sigma_sq,
        } => Ok(gaussian_ts_sample(
            stats,
            *mu0,
            *sigma0_sq,
            *sigma_sq,
            &mut state.rng,
        )),
        PolicyKind::BernoulliTs { alpha, beta, .. } => {
            bernoulli_ts_sample(stats, *alpha, *beta, &mut state.rng)
        }
        PolicyKind::BayesUcb { prior, c } => bayes_ucb_index(stats, prior, t, state.horizon, *c),
        PolicyKind::KlUcb => Ok(kl_ucb_index(stats, t)),
    }
}

/// Arm to pull in `state.round`: forced round-robin while `t <= K`, argmax afterwards.
pub fn select_arm(kind: &PolicyKind, state: &mut PolicyState) -> Result<usize> {
    let t = state.round;
    let k = state.arms();
    if k == 0 {
        return Err(Error::domain("no arms"));
    }
    if t == 0 {
        return Err(Error::domain("rounds start at 1"));
    }
    if t <= k as u64 {
        return Ok(t as usize - 1);
    }
    Ok(argmax(&policy_scores(kind, state)?))
}

/// A policy bound to its episode state.
#[derive(Debug, Clone)]
pub struct Policy {
    config: PolicyConfig,
    state: PolicyState,
}

impl Policy {
    pub fn new(config: PolicyConfig, state: PolicyState) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, state })
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn state(&self) -> &PolicyState {
        &self.state
    }

    pub fn select_arm(&mut self) -> Result<usize> {
        select_arm(&self.config.kind, &mut self.state)
    }

    /// Records the reward of the arm pulled this round and advances the round.
    pub fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        if arm >= self.state.arms() {
            return Err(Error::domain(format!("arm {arm} out of range")));
        }
        if let PolicyKind::BernoulliTs { fractional, .. } = self.config.kind {
            let valid = if fractional {
                (0.0..=1.0).contains(&reward)
            } else {
                reward == 0.0 || reward == 1.0
            };
            if !valid {
                return Err(Error::domain(format!(
                    "Bernoulli Thompson sampling received reward {reward}"
                )));
            }
        }
        self.state.arm_stats[arm].update(reward);
        self.state.round += 1;
        Ok(())
    }
}
