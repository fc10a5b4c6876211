//! Bandit instances: arm means drawn from a prior, rewards drawn around them.

use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of the arm means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PriorSpec {
    Gaussian { mean: f64, variance: f64 },
    Uniform { lo: f64, hi: f64 },
    Beta { alpha: f64, beta: f64 },
    Explicit { means: Vec<f64> },
}

impl PriorSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            PriorSpec::Gaussian { mean, variance } => {
                mean.is_finite() && *variance > 0.0 && variance.is_finite()
            }
            PriorSpec::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            PriorSpec::Beta { alpha, beta } => {
                *alpha > 0.0 && *beta > 0.0 && alpha.is_finite() && beta.is_finite()
            }
            PriorSpec::Explicit { means } => {
                !means.is_empty() && means.iter().all(|m| m.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid prior {self:?}")))
        }
    }

    /// Mean and variance of the prior, when it has them in closed form.
    pub fn moments(&self) -> Option<(f64, f64)> {
        match *self {
            PriorSpec::Gaussian { mean, variance } => Some((mean, variance)),
            PriorSpec::Uniform { lo, hi } => Some(((lo + hi) / 2.0, (hi - lo).powi(2) / 12.0)),
            PriorSpec::Beta { alpha, beta } => {
                let s = alpha + beta;
                Some((alpha / s, alpha * beta / (s * s * (s + 1.0))))
            }
            PriorSpec::Explicit { .. } => None,
        }
    }
}

fn default_lo() -> f64 {
    0.0
}

fn default_hi() -> f64 {
    1.0
}

/// Reward distribution around an arm mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RewardSpec {
    Gaussian {
        variance: f64,
    },
    Bernoulli,
    /// Gaussian draw clipped to `[lo, hi]`.
    TruncatedGaussian {
        variance: f64,
        #[serde(default = "default_lo")]
        lo: f64,
        #[serde(default = "default_hi")]
        hi: f64,
    },
    /// Arm-dependent noise variances.
    HeteroGaussian {
        variances: Vec<f64>,
    },
}

impl RewardSpec {
    pub fn validate(&self) -> Result<()> {
        let ok_var = |v: &f64| v.is_finite() && *v >= 0.0;
        let ok = match self {
            RewardSpec::Gaussian { variance } => ok_var(variance),
            RewardSpec::Bernoulli => true,
            RewardSpec::TruncatedGaussian { variance, lo, hi } => ok_var(variance) && lo < hi,
            RewardSpec::HeteroGaussian { variances } => {
                !variances.is_empty() && variances.iter().all(ok_var)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid reward model {self:?}")))
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, RewardSpec::Bernoulli)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditInstance {
    pub means: Vec<f64>,
    pub reward: RewardSpec,
    pub best_arm: usize,
    pub best_mean: f64,
}

impl BanditInstance {
    pub fn new(means: Vec<f64>, reward: RewardSpec) -> Result<Self> {
        reward.validate()?;
        if means.is_empty() {
            return Err(Error::domain("instance needs at least one arm"));
        }
        if let Some(m) = means.iter().find(|m| !m.is_finite()) {
            return Err(Error::domain(format!("arm mean {m} is not finite")));
        }
        match &reward {
            RewardSpec::Bernoulli => {
                if let Some((k, m)) = means
                    .iter()
                    .enumerate()
                    .find(|(_, m)| !(0.0..=1.0).contains(*m))
                {
                    return Err(Error::domain(format!(
                        "Bernoulli arm {k} has mean {m} outside [0, 1]"
                    )));
                }
            }
            RewardSpec::HeteroGaussian { variances } if variances.len() != means.len() => {
                return Err(Error::domain(format!(
                    "{} noise variances for {} arms",
                    variances.len(),
                    means.len()
                )));
            }
            _ => {}
        }
        let (best_arm, best_mean) =
            means
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, bm), (i, m)| {
                    if m > bm {
                        (i, m)
                    } else {
                        (bi, bm)
                    }
                });
        Ok(Self {
            means,
            reward,
            best_arm,
            best_mean,
        })
    }

    pub fn arms(&self) -> usize {
        self.means.len()
    }

    pub fn gap(&self, arm: usize) -> f64 {
        self.best_mean - self.means[arm]
    }

    pub fn sample_reward<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> f64 {
        let mu = self.means[arm];
        match &self.reward {
            RewardSpec::Gaussian { variance } => gaussian(mu, *variance, rng),
            RewardSpec::Bernoulli => {
                if rng.random::<f64>() < mu {
                    1.0
                } else {
                    0.0
                }
            }
            RewardSpec::TruncatedGaussian { variance, lo, hi } => {
                gaussian(mu, *variance, rng).clamp(*lo, *hi)
            }
            RewardSpec::HeteroGaussian { variances } => gaussian(mu, variances[arm], rng),
        }
    }
}

fn gaussian<R: Rng + ?Sized>(mean: f64, variance: f64, rng: &mut R) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    mean + variance.sqrt() * z
}

/// Draws the arm means of a fresh instance.
pub fn sample_instance<R: Rng + ?Sized>(
    prior: &PriorSpec,
    arms: usize,
    reward: &RewardSpec,
    rng: &mut R,
) -> Result<BanditInstance> {
    prior.validate()?;
    if arms < 2 {
        return Err(Error::domain(format!("need at least two arms, got {arms}")));
    }
    let means = match prior {
        PriorSpec::Gaussian { mean, variance } => {
            (0..arms).map(|_| gaussian(*mean, *variance, rng)).collect()
        }
        PriorSpec::Uniform { lo, hi } => {
            let u = Uniform::new_inclusive(*lo, *hi).map_err(|e| Error::domain(e.to_string()))?;
            (0..arms).map(|_| u.sample(rng)).collect()
        }
        PriorSpec::Beta { alpha, beta } => {
            let b = Beta::new(*alpha, *beta).map_err(|e| Error::domain(e.to_string()))?;
            (0..arms).map(|_| b.sample(rng)).collect()
        }
        PriorSpec::Explicit { means } => {
            if means.len() != arms {
                return Err(Error::domain(format!(
                    "explicit prior lists {} means but {arms} arms were requested",
                    means.len()
                )));
            }
            means.clone()
        }
    };
    BanditInstance::new(means, reward.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn explicit_passthrough() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let prior = PriorSpec::Explicit {
            means: vec![1.0, 0.0],
        };
        let inst =
            sample_instance(&prior, 2, &RewardSpec::Gaussian { variance: 1.0 }, &mut rng).unwrap();
        assert_eq!(inst.means, vec![1.0, 0.0]);
        assert_eq!(inst.best_arm, 0);
        assert_eq!(inst.best_mean, 1.0);
    }

    #[test]
    fn best_arm_ties_go_to_lowest_index() {
        let inst = BanditInstance::new(vec![0.2, 0.7, 0.7], RewardSpec::Bernoulli).unwrap();
        assert_eq!(inst.best_arm, 1);
    }

    #[test]
    fn gaussian_prior_smoke() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let prior = PriorSpec::Gaussian {
            mean: 1.0,
            variance: 0.04,
        };
        let inst = sample_instance(
            &prior,
            50,
            &RewardSpec::Gaussian { variance: 0.25 },
            &mut rng,
        )
        .unwrap();
        let mean = inst.means.iter().sum::<f64>() / 50.0;
        let var = inst.means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / 49.0;
        assert!((mean - 1.0).abs() < 0.1, "mean {mean}");
        assert!((var - 0.04).abs() < 0.02, "var {var}");
    }

    #[test]
    fn uniform_prior_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let prior = PriorSpec::Uniform { lo: 0.2, hi: 0.5 };
        let inst = sample_instance(&prior, 20, &RewardSpec::Bernoulli, &mut rng).unwrap();
        assert!(inst.means.iter().all(|m| (0.2..=0.5).contains(m)));
    }

    #[test]
    fn bernoulli_rejects_out_of_range_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let prior = PriorSpec::Explicit {
            means: vec![0.5, 1.5],
        };
        assert!(sample_instance(&prior, 2, &RewardSpec::Bernoulli, &mut rng).is_err());
    }

    #[test]
    fn too_few_arms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let prior = PriorSpec::Uniform { lo: 0.0, hi: 1.0 };
        assert!(sample_instance(&prior, 1, &RewardSpec::Bernoulli, &mut rng).is_err());
    }

    #[test]
    fn degenerate_rewards() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g =
            BanditInstance::new(vec![0.37, 2.0], RewardSpec::Gaussian { variance: 0.0 }).unwrap();
        assert!((0..100).all(|_| g.sample_reward(0, &mut rng) == 0.37));
        let b = BanditInstance::new(vec![1.0, 0.0], RewardSpec::Bernoulli).unwrap();
        assert!((0..100).all(|_| b.sample_reward(0, &mut rng) == 1.0));
        assert!((0..100).all(|_| b.sample_reward(1, &mut rng) == 0.0));
    }

    #[test]
    fn truncated_gaussian_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let spec = RewardSpec::TruncatedGaussian {
            variance: 0.04,
            lo: 0.0,
            hi: 1.0,
        };
        let inst = BanditInstance::new(vec![0.3, 0.1], spec).unwrap();
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| inst.sample_reward(0, &mut rng)).collect();
        assert!(draws.iter().all(|r| (0.0..=1.0).contains(r)));
        let mean = draws.iter().sum::<f64>() / n as f64;
        // Clipping at 0 lifts the mean of N(0.3, 0.04) to 0.3058496625688366.
        assert!(
            (mean - 0.305_849_662_568_836_6).abs() < 0.002,
            "mean {mean}"
        );
        assert!((mean - 0.3).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn hetero_needs_one_variance_per_arm() {
        let spec = RewardSpec::HeteroGaussian {
            variances: vec![1.0],
        };
        assert!(BanditInstance::new(vec![0.0, 1.0], spec).is_err());
    }

    #[test]
    fn seeded_streams_are_reproducible() {
        let prior = PriorSpec::Gaussian {
            mean: 0.0,
            variance: 1.0,
        };
        let reward = RewardSpec::Gaussian { variance: 1.0 };
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = sample_instance(&prior, 10, &reward, &mut rng).unwrap();
            let rewards: Vec<f64> = (0..50)
                .map(|t| inst.sample_reward(t % 10, &mut rng))
                .collect();
            (inst, rewards)
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42).1, draw(43).1);
    }

    #[test]
    fn prior_moments() {
        assert_eq!(
            PriorSpec::Uniform { lo: 0.0, hi: 1.0 }.moments(),
            Some((0.5, 1.0 / 12.0))
        );
        let (m, v) = PriorSpec::Beta {
            alpha: 9.0,
            beta: 1.0,
        }
        .moments()
        .unwrap();
        assert!((m - 0.9).abs() < 1e-12);
        assert!((v - 0.008_181_818_181_818_182).abs() < 1e-12);
    }
}
