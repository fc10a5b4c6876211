//! KL-UCB for Bernoulli rewards.

use crate::estimators::ArmStats;

pub const KL_UCB_TOLERANCE: f64 = 1e-9;
pub const KL_UCB_MAX_ITERS: usize = 64;

/// Bernoulli KL divergence `KL(p || q)` with `0 log 0 = 0`.
pub fn bernoulli_kl(p: f64, q: f64) -> f64 {
    let term = |x: f64, y: f64| {
        if x == 0.0 {
            0.0
        } else if y == 0.0 {
            f64::INFINITY
        } else {
            x * (x / y).ln()
        }
    };
    term(p, q) + term(1.0 - p, 1.0 - q)
}

/// Largest `q` in `[mean, 1)` with `pulls * KL(mean || q) <= budget`, by bisection.
pub fn kl_ucb_bound(mean: f64, pulls: u64, budget: f64) -> f64 {
    let mean = mean.clamp(0.0, 1.0);
    if budget <= 0.0 || mean >= 1.0 {
        return mean;
    }
    let n = pulls.max(1) as f64;
    let mut lo = mean;
    let mut hi = 1.0;
    for _ in 0..KL_UCB_MAX_ITERS {
        // For large n a width of 1e-9 in q can still leave a visible gap in the budget.
        if hi - lo <= KL_UCB_TOLERANCE && budget - n * bernoulli_kl(mean, lo) <= KL_UCB_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if n * bernoulli_kl(mean, mid) > budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// KL-UCB index with exploration budget `log t`.
pub fn kl_ucb_index(stats: &[ArmStats], t: u64) -> Vec<f64> {
    let budget = (t.max(1) as f64).ln();
    stats
        .iter()
        .map(|s| {
            if s.pulls == 0 {
                return 1.0;
            }
            kl_ucb_bound(s.reward_sum / s.pulls as f64, s.pulls, budget)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_form_inversion_at_zero_mean() {
        let q = kl_ucb_bound(0.0, 1, 1.0);
        assert_abs_diff_eq!(q, 1.0 - (-1.0f64).exp(), epsilon = 1e-8);
    }

    #[test]
    fn zero_budget_returns_mean() {
        assert_eq!(kl_ucb_bound(0.5, 10, 0.0), 0.5);
        assert_eq!(kl_ucb_index(&[ArmStats::new(10, 5.0, 5.0)], 1), vec![0.5]);
    }

    #[test]
    fn many_pulls_shrink_to_mean() {
        let q = kl_ucb_bound(0.3, 100_000_000, (1000f64).ln());
        assert!(q - 0.3 < 1e-3);
        assert!(q >= 0.3);
    }

    #[test]
    fn kl_limits() {
        assert_eq!(bernoulli_kl(0.0, 0.0), 0.0);
        assert_eq!(bernoulli_kl(1.0, 1.0), 0.0);
        assert_eq!(bernoulli_kl(0.5, 0.0), f64::INFINITY);
        assert_abs_diff_eq!(bernoulli_kl(0.0, 0.5), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn unit_mean_stays_at_one() {
        assert_eq!(kl_ucb_bound(1.0, 3, 2.0), 1.0);
    }
}
