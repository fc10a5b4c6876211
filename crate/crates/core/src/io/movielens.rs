//! Recommendation experiment on a completed ratings matrix.
//!
//! Each run draws one user (row) uniformly at random. The arms are the items
//! (columns), with the user's completed ratings as true means and Gaussian
//! rating noise of standard deviation `noise_sd`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::environments::{BanditInstance, RewardSpec};
use crate::error::Result;
use crate::estimators::{VarianceDefaults, PRIOR_VARIANCE_FLOOR};
use crate::harness::{run_with_instances, ExperimentResult};
use crate::io::matrix::RatingMatrix;
use crate::policies::{PolicyConfig, PolicyKind};

/// Row index used by run `run`.
pub fn row_for_run(matrix: &RatingMatrix, base_seed: u64, run: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(run));
    rng.random_range(0..matrix.rows)
}

/// Population mean and variance of the instance means.
fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// Gives Gaussian TS an oracle prior fitted to the sampled user's ratings.
/// Other policies are returned unchanged.
pub fn with_row_prior(policy: &PolicyConfig, instance: &BanditInstance) -> PolicyConfig {
    match policy.kind {
        PolicyKind::GaussianTs { sigma_sq, .. } => {
            let (mu0, var) = mean_and_variance(&instance.means);
            PolicyConfig::new(
                policy.label.clone(),
                PolicyKind::GaussianTs {
                    mu0,
                    sigma0_sq: var.max(PRIOR_VARIANCE_FLOOR),
                    sigma_sq,
                },
            )
        }
        _ => policy.clone(),
    }
}

/// ReUCB, Gaussian TS (prior refitted per user) and UCB1.
pub fn default_policies(noise_sd: f64) -> Vec<PolicyConfig> {
    let sigma_sq = noise_sd * noise_sd;
    vec![
        PolicyConfig::new(
            "ReUCB",
            PolicyKind::ReUcb {
                a: 1.0,
                fallback: VarianceDefaults::default(),
                known_mu0: None,
            },
        ),
        PolicyConfig::new(
            "TS",
            PolicyKind::GaussianTs {
                mu0: 0.0,
                sigma0_sq: 1.0,
                sigma_sq,
            },
        ),
        PolicyConfig::new("UCB1", PolicyKind::Ucb1 { sigma_sq }),
    ]
}

pub fn movielens_experiment(
    matrix: &RatingMatrix,
    horizon: u64,
    runs: u64,
    base_seed: u64,
    policies: &[PolicyConfig],
) -> Result<ExperimentResult> {
    let reward = RewardSpec::Gaussian {
        variance: matrix.noise_sd * matrix.noise_sd,
    };
    run_with_instances(
        policies,
        horizon,
        runs,
        base_seed,
        |run| {
            BanditInstance::new(
                matrix.row(row_for_run(matrix, base_seed, run)).to_vec(),
                reward.clone(),
            )
        },
        with_row_prior,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_matrix_noiseless_regret_is_one_forced_pull() {
        let m = RatingMatrix::new(2, 2, vec![1.0, 0.0, 0.0, 1.0], 0.0).unwrap();
        let res = movielens_experiment(&m, 50, 8, 1, &default_policies(0.0)[..1]).unwrap();
        assert!(res
            .get("ReUCB")
            .unwrap()
            .final_regret_samples
            .iter()
            .all(|&r| r == 1.0));
    }

    #[test]
    fn constant_rows_have_zero_regret() {
        let m = RatingMatrix::new(3, 4, vec![2.0; 12], 0.796).unwrap();
        let res = movielens_experiment(&m, 40, 3, 0, &default_policies(0.796)).unwrap();
        for p in &res.policies {
            assert!(
                p.aggregate.final_regret_samples.iter().all(|&r| r == 0.0),
                "{}",
                p.label
            );
        }
    }

    #[test]
    fn ts_prior_is_refitted() {
        let inst =
            BanditInstance::new(vec![1.0, 3.0], RewardSpec::Gaussian { variance: 1.0 }).unwrap();
        let p = with_row_prior(&default_policies(1.0)[1], &inst);
        assert_eq!(
            p.kind,
            PolicyKind::GaussianTs {
                mu0: 2.0,
                sigma0_sq: 1.0,
                sigma_sq: 1.0
            }
        );
    }
}
