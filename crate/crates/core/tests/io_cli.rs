use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;

use rebandit::environments::{PriorSpec, RewardSpec};
use rebandit::harness::{AggregateResult, ExperimentResult, PolicyResult};
use rebandit::io::movielens::default_policies;
use rebandit::io::{
    load_config, load_rating_matrix, movielens_experiment, write_results, RatingMatrix,
};
use rebandit::{Error, PolicyKind};

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(format!("{name}.toml"))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rebandit"))
}

fn write_tmp(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::File::create(&p)
        .unwrap()
        .write_all(text.as_bytes())
        .unwrap();
    p
}

#[test]
fn bundled_fig1a() {
    let c = load_config(config_path("fig1a")).unwrap();
    let e = &c.experiment;
    assert_eq!((e.arms, e.horizon, e.runs), (50, 10_000, 1000));
    assert_eq!(
        e.prior,
        PriorSpec::Gaussian {
            mean: 1.0,
            variance: 0.04
        }
    );
    assert_eq!(e.reward, RewardSpec::Gaussian { variance: 0.25 });
}

#[test]
fn bundled_fig2b() {
    let c = load_config(config_path("fig2b")).unwrap();
    assert_eq!(c.experiment.arms, 50);
    assert_eq!(c.experiment.prior, PriorSpec::Uniform { lo: 0.2, hi: 0.5 });
    assert_eq!(c.experiment.reward, RewardSpec::Bernoulli);
}

#[test]
fn every_bundled_config_loads() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        load_config(&path).unwrap_or_else(|e| panic!("{e}"));
        count += 1;
    }
    assert!(count >= 10);
}

#[test]
fn zero_runs_rejected() {
    let text = std::fs::read_to_string(config_path("fig2a"))
        .unwrap()
        .replace("runs = 1000", "runs = 0");
    let err = rebandit::io::parse_config(&text, Path::new("fig2a.toml")).unwrap_err();
    assert!(matches!(err, Error::Config { .. }), "{err:?}");
}

#[test]
fn matrix_examples() {
    let dir = tempfile::tempdir().unwrap();
    let m = load_rating_matrix(write_tmp(dir.path(), "m.csv", "1,2\n3,4"), 0.796).unwrap();
    assert_eq!((m.rows, m.cols), (2, 2));
    assert_eq!(m.values, vec![1.0, 2.0, 3.0, 4.0]);
    match load_rating_matrix(write_tmp(dir.path(), "r.csv", "1,2\n3"), 0.796) {
        Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn movielens_examples() {
    let constant = RatingMatrix::new(4, 5, vec![3.0; 20], 0.796).unwrap();
    let res = movielens_experiment(&constant, 100, 5, 1, &default_policies(0.796)).unwrap();
    assert!(res.policies.iter().all(|p| p.aggregate.final_mean() == 0.0));

    let identity = RatingMatrix::new(2, 2, vec![1.0, 0.0, 0.0, 1.0], 0.0).unwrap();
    let res = movielens_experiment(&identity, 200, 20, 3, &default_policies(0.0)).unwrap();
    assert!(res
        .get("ReUCB")
        .unwrap()
        .final_regret_samples
        .iter()
        .all(|&r| r == 1.0));
}

fn single(curve: Vec<f64>) -> AggregateResult {
    AggregateResult {
        n_runs: 1,
        stderr_cum_regret: vec![0.0; curve.len()],
        final_regret_samples: vec![*curve.last().unwrap()],
        mean_cum_regret: curve,
    }
}

#[test]
fn csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let res = ExperimentResult {
        horizon: 2,
        policies: vec![PolicyResult {
            label: "A".into(),
            aggregate: single(vec![0.5, 1.0]),
        }],
    };
    write_results(&res, &serde_json::json!({}), dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows, ["round,A_mean,A_stderr", "1,0.5,0", "2,1,0"]);

    let two = ExperimentResult {
        horizon: 2,
        policies: vec![
            PolicyResult {
                label: "A".into(),
                aggregate: single(vec![0.5, 1.0]),
            },
            PolicyResult {
                label: "B".into(),
                aggregate: single(vec![0.1 + 0.2, 2.0]),
            },
        ],
    };
    write_results(&two, &serde_json::json!({}), dir.path()).unwrap();
    let mut reader = csv::Reader::from_path(dir.path().join("curves.csv")).unwrap();
    assert_eq!(reader.headers().unwrap().len(), 1 + 2 * 2);
    let first = reader.records().next().unwrap().unwrap();
    assert_eq!(first[3].parse::<f64>().unwrap(), 0.1 + 0.2);
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = load_config(config_path("fig3b")).unwrap();
    cfg.experiment.runs = 8;
    cfg.experiment.horizon = 300;
    let read = |sub: &str| {
        let out = dir.path().join(sub);
        write_results(&cfg.experiment.run().unwrap(), &cfg.experiment, &out).unwrap();
        ["curves.csv", "final.csv", "meta.json"].map(|f| std::fs::read(out.join(f)).unwrap())
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn cli_list_and_bound() {
    let out = bin().arg("list-policies").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for kind in [
        "reucb",
        "reucb-star",
        "reucb-inf",
        "ucb1",
        "gaussian-ts",
        "bernoulli-ts",
        "bayes-ucb",
        "kl-ucb",
    ] {
        assert!(text.lines().any(|l| l.starts_with(kind)), "{kind}");
    }

    let out = bin()
        .args([
            "bound",
            "--arms",
            "10",
            "--horizon",
            "10000",
            "--sigma0-sq",
            "1",
            "--sigma-sq",
            "1",
            "--a",
            "1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text
        .lines()
        .find(|l| l.starts_with("gaussian bound (a>=1)"))
        .unwrap();
    let value: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((value / 8579.452_586_537_677 - 1.0).abs() < 1e-9);
}

#[test]
fn cli_coverage() {
    let out = bin()
        .args(["coverage", "--reps", "2000", "--seed", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let c: f64 = text.trim().rsplit(' ').next().unwrap().parse().unwrap();
    assert!((c - 0.95).abs() < 0.02, "{c}");
}

#[test]
fn cli_simulate_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("res");
    let out = bin()
        .args(["--threads", "2", "simulate"])
        .arg(config_path("fig2a"))
        .args(["--runs", "3", "--horizon", "50", "--seed", "9", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let curves = std::fs::read_to_string(out_dir.join("curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 51);
    let finals = std::fs::read_to_string(out_dir.join("final.csv")).unwrap();
    assert_eq!(finals.lines().count(), 1 + 4 * 3);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["base_seed"], 9);
    assert_eq!(meta["experiment"]["runs"], 3);
}

#[test]
fn cli_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_tmp(
        dir.path(),
        "bad.toml",
        "name = \"x\"\narms = 2\nbogus = 1\n",
    );
    let out = bin().arg("simulate").arg(&bad).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bogus") && err.contains("row 3"), "{err}");

    let out = bin()
        .args(["movielens", "/nonexistent/matrix.csv"])
        .output()
        .unwrap();
    assert!(!out.status.success());

    let out = bin()
        .args([
            "bound",
            "--arms",
            "10",
            "--horizon",
            "100",
            "--sigma0-sq",
            "0",
            "--sigma-sq",
            "1",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "preconditions are reported per bound, not fatal"
    );
}

#[test]
fn cli_movielens_synthetic_and_gen_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("m.csv");
    let out = bin()
        .args(["gen-matrix", "--rows", "6", "--cols", "5", "--out"])
        .arg(&matrix)
        .output()
        .unwrap();
    assert!(out.status.success());
    let m = load_rating_matrix(&matrix, 0.796).unwrap();
    assert_eq!((m.rows, m.cols), (6, 5));

    let out = bin()
        .arg("movielens")
        .arg(&matrix)
        .args(["--runs", "2", "--horizon", "40", "--out"])
        .arg(dir.path().join("ml"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(dir.path().join("ml/curves.csv")).unwrap();
    assert!(
        text.starts_with("round,ReUCB_mean,ReUCB_stderr,TS_mean,TS_stderr,UCB1_mean,UCB1_stderr")
    );
    assert!(
        matches!(default_policies(0.5)[2].kind, PolicyKind::Ucb1 { sigma_sq } if sigma_sq == 0.25)
    );
}
