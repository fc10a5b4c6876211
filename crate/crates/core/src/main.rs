use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use rebandit::estimators::VarianceParams;
use rebandit::harness::bounds::unstructured_leading_term;
use rebandit::harness::{
    bounded_means_m, bounded_regret_bound, gaussian_regret_bound, posterior_coverage_check,
    BoundInputs, BoundedBoundVariant, ExperimentResult, GaussianBoundVariant,
};
use rebandit::io::movielens::default_policies;
use rebandit::io::{
    load_config, load_rating_matrix, movielens_experiment, synthetic_rating_matrix, write_results,
};

#[derive(Parser)]
#[command(
    name = "rebandit",
    version,
    about = "Random-effect bandit simulations and regret bounds"
)]
struct Cli {
    /// Worker threads for the Monte Carlo runs (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<u64>,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recommendation experiment on a rating matrix (CSV, no header).
    /// Without a matrix file a synthetic rank-5 matrix is generated.
    Movielens {
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = rebandit::io::DEFAULT_NOISE_SD)]
        noise_sd: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        runs: u64,
        #[arg(long, default_value_t = 10_000)]
        horizon: u64,
        #[arg(long, default_value = "results/movielens")]
        out: PathBuf,
        /// Size of the synthetic matrix when no file is given.
        #[arg(long, default_value_t = 128)]
        synthetic_size: usize,
        #[arg(long, default_value_t = 0)]
        matrix_seed: u64,
    },
    /// Print the Bayes-regret upper bounds for ReUCB with known variances.
    Bound {
        #[arg(long)]
        arms: u64,
        #[arg(long)]
        horizon: u64,
        #[arg(long)]
        sigma0_sq: f64,
        #[arg(long)]
        sigma_sq: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Also print the leading term for an agent ignoring the shared mean,
        /// with this variance of the unknown common mean.
        #[arg(long)]
        sigma_q_sq: Option<f64>,
    },
    /// Monte Carlo coverage of the 95% intervals mu^_k +- 1.96 tau_k.
    Coverage {
        /// Pulls per arm: one value for a balanced allocation, or a comma-separated list.
        #[arg(long, value_delimiter = ',', default_value = "5")]
        pulls: Vec<u64>,
        /// Number of arms for a balanced allocation.
        #[arg(long, default_value_t = 10)]
        arms: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma0_sq: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma_sq: f64,
        #[arg(long, default_value_t = 0.0)]
        mu0: f64,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List policy kinds and their config keys.
    ListPolicies,
    /// Write a synthetic rank-r rating matrix in [0, 5] as CSV.
    GenMatrix {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 128)]
        rows: usize,
        #[arg(long, default_value_t = 128)]
        cols: usize,
        #[arg(long, default_value_t = 5)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

const POLICY_HELP: &[(&str, &str)] = &[
    ("reucb", "a = 1, fallback = { sigma0_sq = 1, sigma_sq = 1 }, known_mu0 (optional)"),
    ("reucb-star", "a = 1, sigma0_sq, sigma_sq, known_mu0 (optional)"),
    ("reucb-inf", "sigma_sq"),
    ("ucb1", "sigma_sq"),
    ("gaussian-ts", "mu0, sigma0_sq, sigma_sq"),
    ("bernoulli-ts", "alpha = 1, beta = 1, fractional = false"),
    ("bayes-ucb", "prior = { family = \"gaussian\", mu0, sigma0_sq, sigma_sq } | { family = \"beta\", alpha, beta }, c = 5"),
    ("kl-ucb", "(no parameters)"),
];

fn print_summary(result: &ExperimentResult) {
    println!("{:<20} {:>14} {:>12}", "policy", "final regret", "stderr");
    for p in &result.policies {
        println!(
            "{:<20} {:>14.3} {:>12.3}",
            p.label,
            p.aggregate.final_mean(),
            p.aggregate.final_stderr()
        );
    }
}

fn report_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn simulate(
    config: &Path,
    seed: Option<u64>,
    runs: Option<u64>,
    horizon: Option<u64>,
    out: Option<PathBuf>,
) -> Result<()> {
    let mut cfg = load_config(config)?;
    if let Some(s) = seed {
        cfg.experiment.base_seed = s;
    }
    if let Some(r) = runs {
        cfg.experiment.runs = r;
    }
    if let Some(h) = horizon {
        cfg.experiment.horizon = h;
    }
    if out.is_some() {
        cfg.out_dir = out;
    }
    cfg.validate()
        .with_context(|| format!("{} after command-line overrides", config.display()))?;
    let result = cfg.experiment.run()?;
    print_summary(&result);
    let meta = json!({
        "name": cfg.name,
        "config": config.display().to_string(),
        "base_seed": cfg.experiment.base_seed,
        "experiment": cfg.experiment,
        "version": env!("CARGO_PKG_VERSION"),
    });
    report_files(&write_results(&result, &meta, &cfg.output_dir())?);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn movielens(
    matrix: Option<PathBuf>,
    noise_sd: f64,
    seed: u64,
    runs: u64,
    horizon: u64,
    out: &Path,
    synthetic_size: usize,
    matrix_seed: u64,
) -> Result<()> {
    let (m, source) = match &matrix {
        Some(path) => (
            load_rating_matrix(path, noise_sd)?,
            json!(path.display().to_string()),
        ),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(matrix_seed);
            let m = synthetic_rating_matrix(synthetic_size, synthetic_size, 5, noise_sd, &mut rng)?;
            (
                m,
                json!({ "synthetic": { "size": synthetic_size, "rank": 5, "seed": matrix_seed } }),
            )
        }
    };
    let policies = default_policies(noise_sd);
    let result = movielens_experiment(&m, horizon, runs, seed, &policies)?;
    print_summary(&result);
    let meta = json!({
        "name": "movielens",
        "matrix": source,
        "rows": m.rows,
        "cols": m.cols,
        "noise_sd": noise_sd,
        "horizon": horizon,
        "runs": runs,
        "base_seed": seed,
        "policies": policies,
        "version": env!("CARGO_PKG_VERSION"),
    });
    report_files(&write_results(&result, &meta, out)?);
    Ok(())
}

fn bound(inputs: BoundInputs, sigma_q_sq: Option<f64>) -> Result<()> {
    for (name, variant) in [
        ("a>=1", GaussianBoundVariant::AtLeast1),
        ("a>=2", GaussianBoundVariant::AtLeast2),
    ] {
        match gaussian_regret_bound(&inputs, variant) {
            Ok(b) => println!("gaussian bound ({name}): {b}"),
            Err(e) => println!("gaussian bound ({name}): n/a ({e})"),
        }
    }
    println!(
        "m = {}",
        bounded_means_m(inputs.arms, inputs.sigma0_sq, inputs.sigma_sq)
    );
    for (name, variant) in [
        ("a>=m", BoundedBoundVariant::AtLeastM),
        ("a>=2m", BoundedBoundVariant::AtLeast2M),
    ] {
        match bounded_regret_bound(&inputs, variant) {
            Ok(b) => println!("bounded-means bound ({name}): {}", b.bound),
            Err(e) => println!("bounded-means bound ({name}): n/a ({e})"),
        }
    }
    if let Some(q) = sigma_q_sq {
        println!(
            "unstructured leading term: {}",
            unstructured_leading_term(&inputs, q)?
        );
    }
    Ok(())
}

fn coverage(
    pulls: Vec<u64>,
    arms: usize,
    params: VarianceParams,
    mu0: f64,
    reps: u64,
    seed: u64,
) -> Result<()> {
    let allocation = match pulls.as_slice() {
        [] => bail!("--pulls needs at least one value"),
        [n] => vec![*n; arms],
        list => list.to_vec(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = posterior_coverage_check(&allocation, &params, mu0, reps, &mut rng)?;
    println!("arms = {}, reps = {reps}, coverage = {c}", allocation.len());
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match cli.command {
        Command::Simulate {
            config,
            seed,
            runs,
            horizon,
            out,
        } => simulate(&config, seed, runs, horizon, out),
        Command::Movielens {
            matrix,
            noise_sd,
            seed,
            runs,
            horizon,
            out,
            synthetic_size,
            matrix_seed,
        } => movielens(
            matrix,
            noise_sd,
            seed,
            runs,
            horizon,
            &out,
            synthetic_size,
            matrix_seed,
        ),
        Command::Bound {
            arms,
            horizon,
            sigma0_sq,
            sigma_sq,
            a,
            sigma_q_sq,
        } => bound(
            BoundInputs {
                arms,
                horizon,
                sigma0_sq,
                sigma_sq,
                a,
            },
            sigma_q_sq,
        ),
        Command::Coverage {
            pulls,
            arms,
            sigma0_sq,
            sigma_sq,
            mu0,
            reps,
            seed,
        } => coverage(
            pulls,
            arms,
            VarianceParams::known(sigma0_sq, sigma_sq)?,
            mu0,
            reps,
            seed,
        ),
        Command::ListPolicies => {
            for (kind, keys) in POLICY_HELP {
                println!("{kind:<14} {keys}");
            }
            Ok(())
        }
        Command::GenMatrix {
            out,
            rows,
            cols,
            rank,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            synthetic_rating_matrix(rows, cols, rank, rebandit::io::DEFAULT_NOISE_SD, &mut rng)?
                .save_csv(&out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}
