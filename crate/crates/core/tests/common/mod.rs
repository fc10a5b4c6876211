#![allow(dead_code)]

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rebandit::estimators::ArmStats;

/// Raw reward lists of one random-effect sample.
pub struct RawSample {
    pub rewards: Vec<Vec<f64>>,
    pub sigma0_sq: f64,
    pub sigma_sq: f64,
}

impl RawSample {
    pub fn stats(&self) -> Vec<ArmStats> {
        self.rewards
            .iter()
            .map(|r| ArmStats::from_rewards(r))
            .collect()
    }

    pub fn pulls(&self) -> Vec<u64> {
        self.rewards.iter().map(|r| r.len() as u64).collect()
    }
}

/// Random configuration: K in [2,100], n_k in [1,1000], variances log-uniform in [1e-3, 1e3].
pub fn random_sample<R: Rng>(rng: &mut R) -> RawSample {
    let k = rng.random_range(2..=100);
    let sigma0_sq = 10f64.powf(rng.random_range(-3.0..=3.0));
    let sigma_sq = 10f64.powf(rng.random_range(-3.0..=3.0));
    let rewards = (0..k)
        .map(|_| {
            let n = rng.random_range(1..=1000);
            let z: f64 = StandardNormal.sample(rng);
            let mu = sigma0_sq.sqrt() * z;
            (0..n)
                .map(|_| {
                    let e: f64 = StandardNormal.sample(rng);
                    mu + sigma_sq.sqrt() * e
                })
                .collect()
        })
        .collect();
    RawSample {
        rewards,
        sigma0_sq,
        sigma_sq,
    }
}

/// Quantities recomputed directly from raw reward lists.
pub struct Oracle {
    pub weights: Vec<f64>,
    pub common_mean: f64,
    pub means: Vec<f64>,
    pub vars: Vec<f64>,
}

pub fn oracle(rewards: &[Vec<f64>], sigma0_sq: f64, sigma_sq: f64) -> Oracle {
    let rbar: Vec<f64> = rewards
        .iter()
        .map(|r| r.iter().sum::<f64>() / r.len() as f64)
        .collect();
    let n: Vec<f64> = rewards.iter().map(|r| r.len() as f64).collect();
    let weights: Vec<f64> = n
        .iter()
        .map(|&n| n * sigma0_sq / (n * sigma0_sq + sigma_sq))
        .collect();
    // g_k = 1 / Var(rbar_k) up to the common factor sigma_sq
    let g: Vec<f64> = n
        .iter()
        .map(|&n| sigma_sq * n / (n * sigma0_sq + sigma_sq))
        .collect();
    let gsum: f64 = g.iter().sum();
    let common_mean = g.iter().zip(&rbar).map(|(g, r)| g * r).sum::<f64>() / gsum;
    let means = weights
        .iter()
        .zip(&rbar)
        .map(|(w, r)| w * r + (1.0 - w) * common_mean)
        .collect();
    let vars = weights
        .iter()
        .zip(&n)
        .map(|(w, n)| w * sigma_sq / n + (1.0 - w).powi(2) * sigma_sq / gsum)
        .collect();
    Oracle {
        weights,
        common_mean,
        means,
        vars,
    }
}

/// Two-pass pooled within-arm variance.
pub fn oracle_reward_variance(rewards: &[Vec<f64>]) -> f64 {
    let mut ss = 0.0;
    let mut dof = 0usize;
    for r in rewards {
        let m = r.iter().sum::<f64>() / r.len() as f64;
        ss += r.iter().map(|x| (x - m).powi(2)).sum::<f64>();
        dof += r.len() - 1;
    }
    ss / dof as f64
}

/// Prior-variance moment estimator evaluated from raw rewards.
pub fn oracle_prior_variance(rewards: &[Vec<f64>]) -> f64 {
    let total: usize = rewards.iter().map(Vec::len).sum();
    let grand = rewards.iter().flatten().sum::<f64>() / total as f64;
    let n_star = total as f64
        - rewards
            .iter()
            .map(|r| (r.len() as f64).powi(2))
            .sum::<f64>()
            / total as f64;
    rewards
        .iter()
        .map(|r| {
            let m = r.iter().sum::<f64>() / r.len() as f64;
            r.len() as f64 * (m - grand).powi(2)
        })
        .sum::<f64>()
        / n_star
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}
