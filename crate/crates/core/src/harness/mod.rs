//! Seeded episodes, Bayes-regret aggregation, regret bounds and posterior coverage.
//!
//! Every run of an experiment draws a fresh instance (from the run's own
//! stream) and plays every policy against that same instance. Rewards and
//! policy randomness come from streams keyed by `(base_seed, run, label)`,
//! so adding or removing a policy never changes what the others see.
//! Runs execute in parallel and are reduced in run order.

pub mod bounds;
pub mod coverage;
pub mod seeds;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::environments::{sample_instance, BanditInstance, PriorSpec, RewardSpec};
use crate::error::{Error, Result};
use crate::policies::{Policy, PolicyConfig, PolicyState};

pub use bounds::{
    bounded_means_m, bounded_regret_bound, gaussian_regret_bound, BoundInputs, BoundedBoundVariant,
    BoundedRegretBound, GaussianBoundVariant,
};
pub use coverage::posterior_coverage_check;
use seeds::{label_id, stream_seed, POLICY_STREAM, REWARD_STREAM};

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub pulled: Vec<usize>,
    pub instant_regret: Vec<f64>,
    pub cum_regret: Vec<f64>,
    pub final_regret: f64,
}

/// Plays one episode of `horizon` rounds.
///
/// `seed` fixes both the reward stream and the policy's own stream.
pub fn run_episode(
    config: &PolicyConfig,
    instance: &BanditInstance,
    horizon: u64,
    seed: u64,
) -> Result<EpisodeResult> {
    let k = instance.arms();
    if horizon < k as u64 {
        return Err(Error::domain(format!(
            "horizon {horizon} is shorter than the {k} initialization rounds"
        )));
    }
    let mut reward_rng = ChaCha8Rng::seed_from_u64(stream_seed(&[seed, REWARD_STREAM]));
    let state = PolicyState::seeded(k, horizon, stream_seed(&[seed, POLICY_STREAM]));
    let mut policy = Policy::new(config.clone(), state)?;

    let n = horizon as usize;
    let mut pulled = Vec::with_capacity(n);
    let mut instant_regret = Vec::with_capacity(n);
    let mut cum_regret = Vec::with_capacity(n);
    let mut total = 0.0;
    for _ in 0..n {
        let arm = policy.select_arm()?;
        let reward = instance.sample_reward(arm, &mut reward_rng);
        policy.update(arm, reward)?;
        let regret = instance.gap(arm);
        total += regret;
        pulled.push(arm);
        instant_regret.push(regret);
        cum_regret.push(total);
    }
    Ok(EpisodeResult {
        pulled,
        instant_regret,
        cum_regret,
        final_regret: total,
    })
}

/// Regret curve statistics of one policy over independent runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub n_runs: u64,
    pub mean_cum_regret: Vec<f64>,
    /// Standard error of the mean curve (zero for a single run).
    pub stderr_cum_regret: Vec<f64>,
    pub final_regret_samples: Vec<f64>,
}

impl AggregateResult {
    pub fn final_mean(&self) -> f64 {
        *self.mean_cum_regret.last().unwrap_or(&0.0)
    }

    pub fn final_stderr(&self) -> f64 {
        *self.stderr_cum_regret.last().unwrap_or(&0.0)
    }
}

/// Welford accumulator over curves, fed in run order.
struct CurveAccumulator {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
    finals: Vec<f64>,
}

impl CurveAccumulator {
    fn new(len: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
            finals: Vec::new(),
        }
    }

    fn push(&mut self, curve: &[f64]) {
        self.count += 1;
        let c = self.count as f64;
        for ((m, s), &x) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(curve) {
            let delta = x - *m;
            *m += delta / c;
            *s += delta * (x - *m);
        }
        self.finals.push(*curve.last().unwrap_or(&0.0));
    }

    fn finish(self) -> AggregateResult {
        let c = self.count as f64;
        let stderr = if self.count > 1 {
            self.m2.iter().map(|s| (s / (c - 1.0) / c).sqrt()).collect()
        } else {
            vec![0.0; self.mean.len()]
        };
        AggregateResult {
            n_runs: self.count,
            mean_cum_regret: self.mean,
            stderr_cum_regret: stderr,
            final_regret_samples: self.finals,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyResult {
    pub label: String,
    pub aggregate: AggregateResult,
}

/// Per-policy results, in the order the policies were given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub horizon: u64,
    pub policies: Vec<PolicyResult>,
}

impl ExperimentResult {
    pub fn get(&self, label: &str) -> Option<&AggregateResult> {
        self.policies
            .iter()
            .find(|p| p.label == label)
            .map(|p| &p.aggregate)
    }
}

fn check_policies(policies: &[PolicyConfig]) -> Result<()> {
    if policies.is_empty() {
        return Err(Error::config("at least one policy is required"));
    }
    for (i, p) in policies.iter().enumerate() {
        p.validate()?;
        if policies[..i].iter().any(|q| q.label == p.label) {
            return Err(Error::config(format!(
                "duplicate policy label {:?}",
                p.label
            )));
        }
    }
    Ok(())
}

/// Runs `runs` independent runs; `make_instance(run)` supplies each run's instance and
/// `adapt` may specialize a policy to that instance before it is played.
pub fn run_with_instances<F, A>(
    policies: &[PolicyConfig],
    horizon: u64,
    runs: u64,
    base_seed: u64,
    make_instance: F,
    adapt: A,
) -> Result<ExperimentResult>
where
    F: Fn(u64) -> Result<BanditInstance> + Sync,
    A: Fn(&PolicyConfig, &BanditInstance) -> PolicyConfig + Sync,
{
    check_policies(policies)?;
    if runs == 0 {
        return Err(Error::config("number of runs must be at least 1"));
    }
    let len = horizon as usize;
    let mut accs: Vec<CurveAccumulator> = policies
        .iter()
        .map(|_| CurveAccumulator::new(len))
        .collect();
    let ids: Vec<u64> = policies.iter().map(|p| label_id(&p.label)).collect();

    let batch = (rayon::current_num_threads() * 4).max(1) as u64;
    let mut start = 0;
    while start < runs {
        let end = (start + batch).min(runs);
        let curves: Vec<Vec<Vec<f64>>> = (start..end)
            .into_par_iter()
            .map(|run| -> Result<Vec<Vec<f64>>> {
                let instance = make_instance(run)?;
                policies
                    .iter()
                    .zip(&ids)
                    .map(|(p, &id)| {
                        let config = adapt(p, &instance);
                        let seed = stream_seed(&[base_seed, run, id]);
                        Ok(run_episode(&config, &instance, horizon, seed)?.cum_regret)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        for per_policy in &curves {
            for (acc, curve) in accs.iter_mut().zip(per_policy) {
                acc.push(curve);
            }
        }
        start = end;
    }

    Ok(ExperimentResult {
        horizon,
        policies: policies
            .iter()
            .zip(accs)
            .map(|(p, acc)| PolicyResult {
                label: p.label.clone(),
                aggregate: acc.finish(),
            })
            .collect(),
    })
}

/// A synthetic Bayes-regret experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub prior: PriorSpec,
    pub reward: RewardSpec,
    pub arms: usize,
    pub horizon: u64,
    pub runs: u64,
    pub base_seed: u64,
    pub policies: Vec<PolicyConfig>,
    /// Reuse the instance of run 0 for every run instead of resampling.
    #[serde(default)]
    pub fixed_instance: bool,
}

impl Experiment {
    pub fn instance_for_run(&self, run: u64) -> Result<BanditInstance> {
        let seed_run = if self.fixed_instance { 0 } else { run };
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed.wrapping_add(seed_run));
        sample_instance(&self.prior, self.arms, &self.reward, &mut rng)
    }

    pub fn run(&self) -> Result<ExperimentResult> {
        self.prior.validate()?;
        self.reward.validate()?;
        run_with_instances(
            &self.policies,
            self.horizon,
            self.runs,
            self.base_seed,
            |run| self.instance_for_run(run),
            |p, _| p.clone(),
        )
    }
}

/// Free-function form of [`Experiment::run`].
#[allow(clippy::too_many_arguments)]
pub fn run_experiment(
    policies: &[PolicyConfig],
    prior: &PriorSpec,
    reward: &RewardSpec,
    arms: usize,
    horizon: u64,
    runs: u64,
    base_seed: u64,
) -> Result<ExperimentResult> {
    Experiment {
        prior: prior.clone(),
        reward: reward.clone(),
        arms,
        horizon,
        runs,
        base_seed,
        policies: policies.to_vec(),
        fixed_instance: false,
    }
    .run()
}
