//! Monte Carlo check that `mu^_k +- z tau_k` covers the true arm mean at the nominal rate.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::estimators::{synthetic_estimate, ArmStats, VarianceParams};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;

/// Fraction of (replicate, arm) pairs with `|mu_k - mu^_k| <= 1.96 tau_k`.
///
/// Each replicate draws `mu_k ~ N(mu0, sigma0_sq)`, then `allocation[k]`
/// Gaussian rewards per arm, and evaluates the synthetic estimator with the
/// true variance components.
pub fn posterior_coverage_check<R: Rng + ?Sized>(
    allocation: &[u64],
    params: &VarianceParams,
    mu0: f64,
    n_reps: u64,
    rng: &mut R,
) -> Result<f64> {
    params.validate()?;
    if allocation.is_empty() || allocation.contains(&0) {
        return Err(Error::domain("every arm needs at least one pull"));
    }
    if n_reps == 0 {
        return Err(Error::domain("need at least one replicate"));
    }
    let prior_sd = params.sigma0_sq.sqrt();
    let noise_sd = params.sigma_sq.sqrt();
    let mut covered = 0u64;
    let mut means = vec![0.0; allocation.len()];
    let mut stats = vec![ArmStats::default(); allocation.len()];
    for _ in 0..n_reps {
        for ((mu, s), &n) in means.iter_mut().zip(stats.iter_mut()).zip(allocation) {
            let z: f64 = StandardNormal.sample(rng);
            *mu = mu0 + prior_sd * z;
            *s = ArmStats::default();
            for _ in 0..n {
                let e: f64 = StandardNormal.sample(rng);
                s.update(*mu + noise_sd * e);
            }
        }
        let est = synthetic_estimate(&stats, params)?;
        covered += means
            .iter()
            .zip(est.synthetic_means.iter().zip(&est.synthetic_vars))
            .filter(|(mu, (m, v))| (*mu - *m).abs() <= Z_95 * v.sqrt())
            .count() as u64;
    }
    Ok(covered as f64 / (n_reps * allocation.len() as u64) as f64)
}
