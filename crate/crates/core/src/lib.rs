//! Random-effect bandits: shrinkage estimators, ReUCB and baseline policies,
//! seeded Bayes-regret experiments and their result files.

pub mod environments;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod io;
pub mod policies;

pub use environments::{sample_instance, BanditInstance, PriorSpec, RewardSpec};
pub use error::{Error, Result};
pub use estimators::{ArmStats, VarianceDefaults, VarianceParams, VarianceSource};
pub use harness::{run_episode, run_experiment, Experiment, ExperimentResult};
pub use policies::{Policy, PolicyConfig, PolicyKind, PolicyState};
