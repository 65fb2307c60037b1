use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use art_cli::config::{
    AggregationSpec, Command as Cmd, ErrorLawSpec, IntervalKind, IntervalSpec, ModelSpec,
    RunConfig, SimulationSpec, TransformSpec,
};
use art_cli::{io, run};
use serde_json::Value;

fn art(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_art"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate_csv(
    dir: &Path,
    name: &str,
    changepoints: &[usize],
    n: usize,
    c_theta: f64,
    seed: u64,
) -> PathBuf {
    let spec = SimulationSpec {
        model: ModelSpec::Mean,
        n,
        d: 1,
        changepoints: changepoints.to_vec(),
        sparsity: 1,
        c_theta,
        c_p: 1.0,
        error_law: ErrorLawSpec::Normal,
    };
    let mut config = base_config(Cmd::Simulate, None);
    config.seed = seed;
    config.simulation = Some(spec);
    let outcome = run(&config).unwrap();
    let mut buf = Vec::new();
    io::write_dataset(outcome.data.as_ref().unwrap(), &mut buf).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, buf).unwrap();
    p
}

fn base_config(command: Cmd, input: Option<&Path>) -> RunConfig {
    RunConfig {
        command,
        input: input.map(|p| p.to_str().unwrap().to_owned()),
        scores: None,
        candidates: None,
        transform: TransformSpec::Auto,
        clusters: None,
        aggregation: AggregationSpec::RankCusum,
        scp: AggregationSpec::RankCusum,
        intervals: IntervalSpec {
            kind: IntervalKind::Seeded,
            h: None,
            decay: std::f64::consts::FRAC_1_SQRT_2,
            min_len: 4,
        },
        alpha: 0.1,
        replicates: 200,
        seed: 0,
        jitter_eps: 1e-6,
        simulation: None,
    }
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn test_is_deterministic_and_reports_its_settings() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate_csv(dir.path(), "null.csv", &[], 120, 0.0, 1);
    let args = [
        "test",
        "--input",
        path(&data),
        "--alpha",
        "0.1",
        "--B",
        "200",
        "--seed",
        "7",
        "--h",
        "20",
    ];
    let a = art(&args);
    let b = art(&args);
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["B"], 200);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["alpha"], 0.1);
    assert_eq!(r["intervals_used"]["count"], 5);
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
    let p = r["p_value"].as_f64().unwrap();
    assert!(p > 0.0 && p < 1.0);
    assert_eq!(r["reject"], p < 0.1);
    assert_eq!(a.status.code(), Some(if p < 0.1 { 2 } else { 0 }));
}

#[test]
fn big_jump_is_rejected_for_every_seed() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..100u64 {
        let data = simulate_csv(dir.path(), "jump.csv", &[50], 100, 5.0, seed);
        let out = art(&[
            "test",
            "--input",
            path(&data),
            "--h",
            "20",
            "--seed",
            &seed.to_string(),
        ]);
        assert_eq!(out.status.code(), Some(2), "seed {seed}");
        assert_eq!(json(&out)["reject"], true);
    }
}

#[test]
fn malformed_csv_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let ragged = write(dir.path(), "ragged.csv", "a,b\n1,2\n3,4\n5\n");
    let out = art(&["test", "--input", path(&ragged)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line: 4"), "{err}");

    let text = write(dir.path(), "text.csv", "a\n1\n2\nnope\n");
    let out = art(&["test", "--input", path(&text)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn localize_on_noise_rarely_finds_anything() {
    let dir = tempfile::tempdir().unwrap();
    let reps = 100;
    let mut nonempty = 0;
    for rep in 0..reps {
        let data = simulate_csv(dir.path(), "noise.csv", &[], 100, 0.0, 500 + rep);
        let mut config = base_config(Cmd::Localize, Some(&data));
        config.seed = rep;
        let out = run(&config).unwrap();
        let r: Value = serde_json::from_str(&out.json).unwrap();
        nonempty += !r["regions"].as_array().unwrap().is_empty() as usize;
    }
    let bound = 0.1 + 3.0 * (0.09f64 / reps as f64).sqrt();
    assert!(nonempty as f64 / reps as f64 <= bound, "{nonempty}");
}

#[test]
fn precomputed_scores_bypass_transforms() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (0..40)
        .map(|i| format!("{}\n", ((i * 13) % 41) as f64 * 0.5))
        .collect();
    let scores = write(dir.path(), "s.csv", &format!("score\n{rows}"));
    let data = write(dir.path(), "d.csv", &format!("value\n{rows}"));
    let a = json(&art(&[
        "localize",
        "--scores",
        path(&scores),
        "--seed",
        "3",
    ]));
    let b = json(&art(&[
        "localize",
        "--input",
        path(&data),
        "--transform",
        "identity",
        "--seed",
        "3",
    ]));
    assert_eq!(a["transform"]["name"], "precomputed");
    assert_eq!(a["regions"], b["regions"]);
    assert_eq!(a["threshold"], b["threshold"]);

    let stdin = Command::new(env!("CARGO_BIN_EXE_art"))
        .args(["localize", "--scores", "-", "--seed", "3"])
        .stdin(std::fs::File::open(&scores).unwrap())
        .output()
        .unwrap();
    assert_eq!(json(&stdin)["regions"], a["regions"]);
}

#[test]
fn invalid_window_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate_csv(dir.path(), "d.csv", &[], 50, 0.0, 1);
    let out = art(&[
        "localize",
        "--input",
        path(&data),
        "--intervals",
        "moving",
        "--h",
        "30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = art(&["test", "--input", path(&data), "--intervals", "sliding"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn postdetect_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate_csv(dir.path(), "d.csv", &[100], 200, 10.0, 2);
    let empty = write(dir.path(), "empty.csv", "candidate\n");
    let out = art(&[
        "postdetect",
        "--input",
        path(&data),
        "--candidates",
        path(&empty),
        "--h",
        "30",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["retained"], serde_json::json!([]));
    assert!(r["threshold"]["value"].as_f64().unwrap() > 0.0);

    let outside = write(dir.path(), "outside.csv", "candidate\n100\n185\n");
    let out = art(&[
        "postdetect",
        "--input",
        path(&data),
        "--candidates",
        path(&outside),
        "--h",
        "30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("candidate 185"));

    let good = write(dir.path(), "good.csv", "candidate\n30\n100\n");
    let r = json(&art(&[
        "postdetect",
        "--input",
        path(&data),
        "--candidates",
        path(&good),
        "--h",
        "30",
    ]));
    assert_eq!(r["retained"], serde_json::json!([100]));
    assert_eq!(r["dropped"], serde_json::json!([30]));
    assert_eq!(r["intervals_used"]["count"], 141);
}

#[test]
fn postdetect_fwer_at_the_cli_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let candidates = write(dir.path(), "c.csv", "candidate\n50\n100\n150\n");
    let reps = 100;
    let mut any = 0;
    for rep in 0..reps {
        let data = simulate_csv(dir.path(), "noise.csv", &[], 200, 0.0, 900 + rep);
        let mut config = base_config(Cmd::Postdetect, Some(&data));
        config.candidates = Some(path(&candidates).to_owned());
        config.intervals = IntervalSpec {
            kind: IntervalKind::Sliding,
            h: Some(30),
            ..config.intervals
        };
        config.seed = rep;
        let r: Value = serde_json::from_str(&run(&config).unwrap().json).unwrap();
        any += !r["retained"].as_array().unwrap().is_empty() as usize;
    }
    let bound = 0.1 + 3.0 * (0.09f64 / reps as f64).sqrt();
    assert!(any as f64 / reps as f64 <= bound, "{any}");
}

/// Kolmogorov–Smirnov distance to the uniform law.
fn ks_uniform(mut p: Vec<f64>) -> f64 {
    p.sort_by(f64::total_cmp);
    let n = p.len() as f64;
    p.iter()
        .enumerate()
        .map(|(i, &v)| (v - i as f64 / n).max((i + 1) as f64 / n - v))
        .fold(0.0, f64::max)
}

#[test]
fn simulate_then_test_gives_uniform_p_values() {
    let dir = tempfile::tempdir().unwrap();
    let reps = 200;
    let p: Vec<f64> = (0..reps)
        .map(|rep| {
            let data = simulate_csv(dir.path(), "h0.csv", &[], 60, 0.0, 4000 + rep);
            let mut config = base_config(Cmd::Test, Some(&data));
            config.intervals = IntervalSpec {
                kind: IntervalKind::Moving,
                h: Some(10),
                ..config.intervals
            };
            config.replicates = 99;
            config.seed = rep;
            let r: Value = serde_json::from_str(&run(&config).unwrap().json).unwrap();
            r["p_value"].as_f64().unwrap()
        })
        .collect();
    // Asymptotic 0.01 critical value of the one-sample KS statistic.
    assert!(ks_uniform(p) < 1.628 / (reps as f64).sqrt());
}

#[test]
fn simulate_echoes_the_design_and_rejects_bad_values() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sim.csv");
    let out = art(&[
        "simulate",
        "--model",
        "regression",
        "--n",
        "50",
        "--d",
        "4",
        "--changepoints",
        "20,35",
        "--sparsity",
        "2",
        "--c-theta",
        "1.5",
        "--error-law",
        "t3",
        "--seed",
        "9",
        "--data-output",
        path(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["design"]["changepoints"], serde_json::json!([20, 35]));
    assert_eq!(r["design"]["model"], "regression");
    assert_eq!(r["design"]["error_law"], "t3");
    assert_eq!(r["design"], r["config"]["simulation"]);
    assert_eq!(r["parameters"].as_array().unwrap().len(), 3);
    let table = io::read_table(path(&csv)).unwrap();
    assert_eq!(table.header, ["y", "x1", "x2", "x3", "x4"]);
    assert_eq!(table.rows.len(), 50);

    let bad = art(&[
        "simulate",
        "--model",
        "median",
        "--n",
        "50",
        "--data-output",
        path(&csv),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let bad = art(&[
        "simulate",
        "--model",
        "mean",
        "--n",
        "50",
        "--changepoints",
        "60",
        "--data-output",
        path(&csv),
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn replay_reproduces_reports() {
    let dir = tempfile::tempdir().unwrap();
    let data = simulate_csv(dir.path(), "d.csv", &[60], 120, 2.0, 5);
    let report = dir.path().join("r.json");
    let again = dir.path().join("r2.json");
    for args in [
        vec!["test", "--h", "15", "--aggregation", "np-likelihood"],
        vec![
            "localize",
            "--intervals",
            "all",
            "--min-len",
            "10",
            "--scp",
            "np-likelihood",
        ],
    ] {
        let mut full = args.clone();
        full.extend([
            "--input",
            path(&data),
            "--seed",
            "11",
            "--output",
            path(&report),
        ]);
        art(&full);
        let out = art(&[
            "replay",
            "--report",
            path(&report),
            "--output",
            path(&again),
        ]);
        assert!(out.status.code() == Some(0) || out.status.code() == Some(2));
        assert_eq!(
            std::fs::read(&report).unwrap(),
            std::fs::read(&again).unwrap()
        );
    }
}

#[test]
fn regression_and_multivariate_inputs_use_their_transforms() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("reg.csv");
    art(&[
        "simulate",
        "--model",
        "regression",
        "--n",
        "80",
        "--d",
        "5",
        "--changepoints",
        "40",
        "--sparsity",
        "2",
        "--c-theta",
        "2",
        "--seed",
        "1",
        "--data-output",
        path(&csv),
    ]);
    let r = json(&art(&["test", "--input", path(&csv), "--h", "10"]));
    assert_eq!(r["transform"]["name"], "residual");
    assert!(r["transform"]["lasso_lambda"].as_f64().unwrap() > 0.0);
    let r = json(&art(&[
        "test",
        "--input",
        path(&csv),
        "--h",
        "10",
        "--transform",
        "kmeans",
    ]));
    assert_eq!(r["transform"]["name"], "kmeans");
    assert_eq!(r["jitter"]["applied"], true);

    let vec_csv = dir.path().join("vec.csv");
    art(&[
        "simulate",
        "--model",
        "full",
        "--n",
        "80",
        "--d",
        "3",
        "--changepoints",
        "40",
        "--seed",
        "1",
        "--data-output",
        path(&vec_csv),
    ]);
    let r = json(&art(&["test", "--input", path(&vec_csv), "--h", "10"]));
    assert_eq!(r["transform"]["name"], "kmeans");
    let r = json(&art(&[
        "test",
        "--input",
        path(&vec_csv),
        "--h",
        "10",
        "--transform",
        "gaussian-deviance",
    ]));
    assert_eq!(r["transform"]["name"], "gaussian-deviance");
    let out = art(&["test", "--input", path(&vec_csv), "--transform", "identity"]);
    assert_eq!(out.status.code(), Some(1));
}
