//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::Command;
use std::time::Instant;

use art_cli::config::TransformSpec;
use art_cli::pipeline::transform;
use art_core::engine::{multiscale_stats, p_value_multi, p_value_single};
use art_core::rank::{rank_cusum_partial_sums, ranks};
use art_core::simgen::{simulate, ChangeDesign, ErrorLaw, Model};
use art_core::transform::identity_scores;
use art_core::{
    aggregate, localize, tune_filter, AggregationKind, CandidateSet, Dataset, Interval,
    IntervalSet, PermutationPlan, ScoreSeries,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

/// Error laws with the scale constants of the size study.
const SIZE_LAWS: [(ErrorLaw, f64); 3] = [
    (ErrorLaw::Normal, 0.25),
    (ErrorLaw::StudentT3, 3.0),
    (ErrorLaw::LogNormal, 1.0),
];

fn mean_scores(
    n: usize,
    changepoints: &[usize],
    c_theta: f64,
    law: ErrorLaw,
    c_p: f64,
    seed: u64,
) -> ScoreSeries {
    let design = ChangeDesign {
        model: Model::Mean,
        n,
        d: 1,
        changepoints: changepoints.to_vec(),
        sparsity: 1,
        c_theta,
        c_p,
        error_law: law,
        seed,
    };
    identity_scores(&simulate(&design).unwrap().data).unwrap()
}

/// Asymptotic Kolmogorov tail `P(K > λ)` with the small-sample correction
/// `λ = (√n + 0.12 + 0.11/√n) D`.
fn kolmogorov_p(d: f64, n_eff: f64) -> f64 {
    let lambda = (n_eff.sqrt() + 0.12 + 0.11 / n_eff.sqrt()) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

fn ks_uniform(mut sample: Vec<f64>) -> (f64, f64) {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let d = sample
        .iter()
        .enumerate()
        .map(|(i, &v)| (v - i as f64 / n).max((i + 1) as f64 / n - v))
        .fold(0.0, f64::max);
    (d, kolmogorov_p(d, n))
}

fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    (d, kolmogorov_p(d, na * nb / (na + nb)))
}

fn size_exactness() -> Verdict {
    let reps = 1000;
    let set = IntervalSet::moving_windows(200, 20).unwrap();
    let mut rates = Vec::new();
    for (l, &(law, c_p)) in SIZE_LAWS.iter().enumerate() {
        let mut rejections = 0;
        for rep in 0..reps {
            let seed = 1_000_000 * (l as u64 + 1) + rep;
            let scores = mean_scores(200, &[], 0.0, law, c_p, seed);
            let plan = PermutationPlan::new(200, seed).unwrap();
            let p = p_value_multi(&scores, &set, AggregationKind::RankCusum, &plan).unwrap();
            rejections += (p.value < 0.1) as usize;
        }
        rates.push((law.name(), rejections as f64 / reps as f64));
    }
    let passed = rates.iter().all(|&(_, r)| (0.07..=0.13).contains(&r));
    verdict(
        passed,
        format!("rejection rates {rates:?}, required in [0.07, 0.13]"),
    )
}

fn p_value_uniformity() -> Verdict {
    let reps = 2000;
    let p: Vec<f64> = (0..reps)
        .map(|rep| {
            let scores = mean_scores(50, &[], 0.0, ErrorLaw::Normal, 1.0, 2_000_000 + rep);
            let plan = PermutationPlan::new(99, rep).unwrap();
            p_value_single(&scores, AggregationKind::RankCusum, &plan)
                .unwrap()
                .value
        })
        .collect();
    let (d, pks) = ks_uniform(p);
    verdict(
        pks > 0.01,
        format!("KS D = {d:.4}, p = {pks:.4}, required p > 0.01"),
    )
}

fn localization() -> Verdict {
    let reps = 500;
    let truth = [90, 180];
    let set = IntervalSet::seeded(300, std::f64::consts::FRAC_1_SQRT_2).unwrap();
    let (mut fwer, mut tp_sum, mut tpp_sum, mut tpp_count, mut p_sum) = (0, 0, 0.0, 0, 0);
    for rep in 0..reps {
        let scores = mean_scores(300, &truth, 2.0, ErrorLaw::Normal, 1.0, 3_000_000 + rep);
        let plan = PermutationPlan::new(200, rep).unwrap();
        let r = localize(&scores, &set, AggregationKind::RankCusum, 0.1, &plan).unwrap();
        let p = r.regions.len();
        let tp = r
            .regions
            .iter()
            .filter(|iv| truth.iter().any(|&tau| iv.straddles(tau)))
            .count();
        fwer += (p > tp) as usize;
        tp_sum += tp;
        p_sum += p;
        if p > 0 {
            tpp_sum += tp as f64 / p as f64;
            tpp_count += 1;
        }
    }
    let fwer = fwer as f64 / reps as f64;
    let tp = tp_sum as f64 / reps as f64;
    let tpp = tpp_sum / tpp_count.max(1) as f64;
    let p = p_sum as f64 / reps as f64;
    verdict(
        fwer <= 0.13 && tp >= 1.85 && tpp >= 0.93,
        format!(
            "{} seeded intervals: FWER {fwer:.3} (<= 0.13), P {p:.3}, TP {tp:.3} (>= 1.85), TPP {tpp:.3} (>= 0.93)",
            set.len()
        ),
    )
}

fn post_detection_fwer() -> Verdict {
    let reps = 500;
    let candidates = CandidateSet::new(vec![50, 100, 150], 30, 200).unwrap();
    let mut rates = Vec::new();
    for (l, &(law, c_p)) in SIZE_LAWS.iter().enumerate() {
        let mut any = 0;
        for rep in 0..reps {
            let seed = 4_000_000 + 10_000 * l as u64 + rep;
            let scores = mean_scores(200, &[], 0.0, law, c_p, seed);
            let plan = PermutationPlan::new(200, seed).unwrap();
            let r =
                tune_filter(&scores, &candidates, AggregationKind::RankCusum, 0.1, &plan).unwrap();
            any += !r.retained.is_empty() as usize;
        }
        rates.push((law.name(), any as f64 / reps as f64));
    }
    let passed = rates.iter().all(|&(_, r)| r <= 0.13);
    verdict(
        passed,
        format!("retain-any rates {rates:?}, required <= 0.13"),
    )
}

fn permutations(m: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut p: Vec<u32> = (1..=m as u32).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (0..m - 1).rev().find(|&i| p[i] < p[i + 1]) else {
            return out;
        };
        let j = (i + 1..m).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
}

fn wilcoxon_identity() -> Verdict {
    let mut discrepancy = 0i64;
    let mut stat_mismatch = 0;
    let mut count = 0;
    for m in 2..=7usize {
        for p in permutations(m) {
            let s: Vec<f64> = p.iter().map(|&r| f64::from(r)).collect();
            let scores = ScoreSeries::new(s.clone()).unwrap();
            let sums = rank_cusum_partial_sums(&ranks(&scores, Interval::full(m)).unwrap());
            let mut best = 0i64;
            for t in 1..m {
                // Twice the centred Mann-Whitney count 2 Σ_{i≤t} Σ_{j>t} 1(S_j ≤ S_i) − t(m − t).
                let mut count_le = 0i64;
                for i in 0..t {
                    for j in t..m {
                        count_le += (s[j] <= s[i]) as i64;
                    }
                }
                let w2 = 2 * count_le - (t * (m - t)) as i64;
                discrepancy = discrepancy.max((sums[t - 1] - w2).abs());
                best = best.max(w2.abs());
            }
            let mf = m as f64;
            let stat = aggregate(&scores, Interval::full(m), AggregationKind::RankCusum)
                .unwrap()
                .statistic;
            stat_mismatch += (stat != 0.5 * best as f64 / (mf * mf.sqrt())) as usize;
            count += 1;
        }
    }
    verdict(
        discrepancy == 0 && stat_mismatch == 0,
        format!("{count} permutations, max integer discrepancy {discrepancy}, scaled mismatches {stat_mismatch}"),
    )
}

fn distribution_freeness() -> Verdict {
    let reps = 2000;
    let set = IntervalSet::moving_windows(100, 20).unwrap();
    let samples: Vec<(&str, Vec<f64>)> = SIZE_LAWS
        .iter()
        .enumerate()
        .map(|(l, &(law, c_p))| {
            let t = (0..reps)
                .map(|rep| {
                    let seed = 5_000_000 + 10_000 * l as u64 + rep;
                    let scores = mean_scores(100, &[], 0.0, law, c_p, seed);
                    multiscale_stats(&scores, &set, AggregationKind::RankCusum)
                        .unwrap()
                        .into_iter()
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect();
            (law.name(), t)
        })
        .collect();
    let mut pairs = Vec::new();
    for a in 0..samples.len() {
        for b in a + 1..samples.len() {
            let (_, p) = ks_two_sample(&samples[a].1, &samples[b].1);
            pairs.push((samples[a].0, samples[b].0, (p * 1e4).round() / 1e4));
        }
    }
    let passed = pairs.iter().all(|&(_, _, p)| p > 0.01);
    verdict(
        passed,
        format!("pairwise KS p-values {pairs:?}, required > 0.01"),
    )
}

fn permuted(data: &Dataset, perm: &[usize]) -> Dataset {
    let rows: Vec<Vec<f64>> = perm.iter().map(|&i| data.row(i).to_vec()).collect();
    match data.response() {
        Some(y) => Dataset::regression(
            perm.iter().map(|&i| y[i]).collect(),
            rows.concat(),
            data.d(),
        )
        .unwrap(),
        None => Dataset::from_rows(&rows).unwrap(),
    }
}

fn symmetry() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut fixture = |model: Model, n: usize, d: usize| {
        simulate(&ChangeDesign {
            model,
            n,
            d,
            changepoints: vec![n / 2],
            sparsity: d.min(2),
            c_theta: 1.0,
            c_p: 1.0,
            error_law: ErrorLaw::Normal,
            seed: rng.random(),
        })
        .unwrap()
        .data
    };
    let univariate = fixture(Model::Mean, 60, 1);
    let multivariate = fixture(Model::Mean, 60, 4);
    let regression = fixture(Model::Regression, 60, 6);
    let cases: Vec<(&str, &Dataset, TransformSpec)> = vec![
        ("identity", &univariate, TransformSpec::Identity),
        (
            "gaussian-deviance",
            &multivariate,
            TransformSpec::GaussianDeviance,
        ),
        ("residual", &regression, TransformSpec::Residual),
        ("kmeans", &multivariate, TransformSpec::Kmeans),
        ("kmeans-regression", &regression, TransformSpec::Kmeans),
    ];
    let mut failures = Vec::new();
    let mut perm_rng = ChaCha8Rng::seed_from_u64(78);
    for (name, data, spec) in &cases {
        let base = transform(data, *spec, None).unwrap().0;
        for _ in 0..50 {
            let mut perm: Vec<usize> = (0..data.n()).collect();
            perm.shuffle(&mut perm_rng);
            let moved = transform(&permuted(data, &perm), *spec, None).unwrap().0;
            let identical = perm
                .iter()
                .enumerate()
                .all(|(k, &i)| moved.values()[k].to_bits() == base.values()[i].to_bits());
            if !identical {
                failures.push(*name);
                break;
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{} transforms x 50 permutations, failures {failures:?}",
            cases.len()
        ),
    )
}

fn thread_invariance() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let art = |args: &[&str], threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_art"))
            .args(args)
            .args(["--threads", threads])
            .output()
            .unwrap()
    };
    let data = p("data.csv");
    let reg = p("reg.csv");
    let candidates = p("cand.csv");
    std::fs::write(&candidates, "candidate\n40\n90\n150\n").unwrap();
    for (file, model) in [(&data, "mean"), (&reg, "regression")] {
        let status = Command::new(env!("CARGO_BIN_EXE_art"))
            .args([
                "simulate",
                "--model",
                model,
                "--n",
                "200",
                "--d",
                "4",
                "--sparsity",
                "2",
            ])
            .args([
                "--changepoints",
                "90",
                "--c-theta",
                "1.5",
                "--seed",
                "3",
                "--data-output",
                file,
            ])
            .output()
            .unwrap()
            .status;
        assert!(status.success());
    }
    let commands: Vec<Vec<&str>> = vec![
        vec!["test", "--input", &data, "--h", "20", "--seed", "5"],
        vec![
            "test",
            "--input",
            &reg,
            "--h",
            "20",
            "--aggregation",
            "np-likelihood",
            "--seed",
            "5",
        ],
        vec!["localize", "--input", &data, "--seed", "5"],
        vec![
            "localize",
            "--input",
            &reg,
            "--transform",
            "kmeans",
            "--seed",
            "5",
        ],
        vec![
            "postdetect",
            "--input",
            &data,
            "--candidates",
            &candidates,
            "--h",
            "30",
            "--seed",
            "5",
        ],
    ];
    let mut mismatches = Vec::new();
    for args in &commands {
        let outputs: Vec<Vec<u8>> = ["1", "4", "8"]
            .iter()
            .map(|t| art(args, t).stdout)
            .collect();
        if outputs[0].is_empty() || outputs.iter().any(|o| *o != outputs[0]) {
            mismatches.push(args[0]);
        }
    }
    let sims: Vec<(Vec<u8>, Vec<u8>)> = ["1", "4", "8"]
        .iter()
        .map(|t| {
            let out = Command::new(env!("CARGO_BIN_EXE_art"))
                .args([
                    "simulate",
                    "--model",
                    "partial",
                    "--n",
                    "100",
                    "--d",
                    "5",
                    "--changepoints",
                    "50",
                ])
                .args(["--seed", "8", "--data-output", &p("sim.csv")])
                .env("ART_THREADS", t)
                .output()
                .unwrap();
            (out.stdout, std::fs::read(p("sim.csv")).unwrap())
        })
        .collect();
    if sims.iter().any(|s| *s != sims[0]) {
        mismatches.push("simulate");
    }
    verdict(
        mismatches.is_empty(),
        format!(
            "{} commands x threads {{1, 4, 8}}, mismatches {mismatches:?}",
            commands.len() + 1
        ),
    )
}

fn adjusted_ecdf(sample: &[f64], s: f64) -> f64 {
    let below = sample.iter().filter(|&&v| v <= s).count() as f64;
    (below + 0.5) / (sample.len() as f64 + 1.0)
}

fn kl_term(size: f64, p: f64, q: f64) -> f64 {
    size * (p * (p / q).ln() + (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln())
}

fn np_likelihood_direct(s: &[f64]) -> f64 {
    let m = s.len();
    (2..=m - 2)
        .map(|t| {
            let (left, right) = s.split_at(t);
            let integral: f64 = s
                .iter()
                .map(|&x| {
                    let f = adjusted_ecdf(s, x);
                    let lam = kl_term(t as f64, adjusted_ecdf(left, x), f)
                        + kl_term((m - t) as f64, adjusted_ecdf(right, x), f);
                    lam / (f * (1.0 - f)) / (m as f64 + 1.0)
                })
                .sum();
            2.0 * integral
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn np_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let m = rng.random_range(8..=20);
        let s: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let got = aggregate(
            &ScoreSeries::new(s.clone()).unwrap(),
            Interval::full(m),
            AggregationKind::NpLikelihood,
        )
        .unwrap()
        .statistic;
        let want = np_likelihood_direct(&s);
        worst = worst.max((got - want).abs() / want.abs());
    }
    verdict(
        worst <= 1e-10,
        format!("200 vectors, max relative error {worst:.3e} (<= 1e-10)"),
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("size exactness", size_exactness),
        ("p-value uniformity", p_value_uniformity),
        ("localization FWER and power", localization),
        ("post-detection FWER", post_detection_fwer),
        ("rank-CUSUM / Wilcoxon identity", wilcoxon_identity),
        ("distribution-freeness", distribution_freeness),
        ("symmetry of transforms", symmetry),
        ("determinism across thread counts", thread_invariance),
        ("np-likelihood oracle equivalence", np_oracle),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let v = check();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} {name}: {} [{:.1}s]",
            v.detail,
            start.elapsed().as_secs_f64()
        );
        failed += !v.passed as usize;
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
