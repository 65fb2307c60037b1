//! The four commands as library functions. Each returns the report text and
//! the process exit code.

use anyhow::{bail, Context, Result};

use art_core::engine::{p_value_multi, PermutationPlan};
use art_core::localize::localize_with;
use art_core::simgen::{simulate, ChangeDesign};
use art_core::{
    tune_filter, AggregationKind, CandidateSet, Dataset, DatasetKind, IntervalSet, IntervalStrategy,
};

use crate::config::{Command, IntervalKind, RunConfig};
use crate::io;
use crate::pipeline::{build_intervals, prepare};
use crate::report::{
    IntervalSummary, LocalizeBody, PostdetectBody, RegionReport, Report, SimulateBody, TestBody,
    ThresholdReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
/// `test` rejected the no-change hypothesis.
pub const EXIT_REJECT: i32 = 2;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub json: String,
    pub exit_code: i32,
    /// Simulated observations (`simulate` only).
    pub data: Option<Dataset>,
}

fn plan(config: &RunConfig) -> Result<PermutationPlan> {
    Ok(PermutationPlan::new(config.replicates, config.seed)?)
}

fn summary(set: &IntervalSet) -> IntervalSummary {
    let strategy = match set.strategy() {
        IntervalStrategy::MovingWindow { h } => format!("moving(h={h})"),
        IntervalStrategy::SlidingWindow { h } => format!("sliding(h={h})"),
        IntervalStrategy::Seeded { decay } => format!("seeded(decay={decay})"),
        IntervalStrategy::AllSubintervals { min_len } => format!("all(min_len={min_len})"),
        IntervalStrategy::Explicit if set.len() == 1 => "full".to_owned(),
        IntervalStrategy::Explicit => "explicit".to_owned(),
    };
    IntervalSummary {
        strategy,
        count: set.len(),
    }
}

fn check_alpha(config: &RunConfig) -> Result<()> {
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        bail!("--alpha must lie in (0, 1), got {}", config.alpha);
    }
    Ok(())
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    match config.command {
        Command::Test => run_test(config),
        Command::Localize => run_localize(config),
        Command::Postdetect => run_postdetect(config),
        Command::Simulate => run_simulate(config),
    }
}

/// Randomized multi-scale p-value; rejects when `p < α`.
pub fn run_test(config: &RunConfig) -> Result<Outcome> {
    check_alpha(config)?;
    let prepared = prepare(config)?;
    let n = prepared.scores.len();
    let set = build_intervals(&config.intervals, n)?;
    let kind = AggregationKind::from(config.aggregation);
    let p = p_value_multi(&prepared.scores, &set, kind, &plan(config)?)?;
    let reject = p.value < config.alpha;
    let body = TestBody {
        p_value: p.value,
        statistic: p.statistic,
        reject,
        replicates_above: p.exceed,
        replicates_tied: p.ties,
        tie_break_u: p.randomized_u,
        aggregation: kind.name(),
        intervals_used: summary(&set),
        n,
        transform: prepared.transform,
        jitter: prepared.jitter,
    };
    Ok(Outcome {
        json: Report::new(config, body).to_json(),
        exit_code: if reject { EXIT_REJECT } else { EXIT_OK },
        data: None,
    })
}

pub fn run_localize(config: &RunConfig) -> Result<Outcome> {
    check_alpha(config)?;
    let prepared = prepare(config)?;
    let n = prepared.scores.len();
    let set = build_intervals(&config.intervals, n)?;
    let kind = AggregationKind::from(config.aggregation);
    let scp = AggregationKind::from(config.scp);
    let result = localize_with(
        &prepared.scores,
        &set,
        kind,
        config.alpha,
        &plan(config)?,
        scp,
    )?;
    let regions = result
        .regions
        .iter()
        .zip(&result.region_statistics)
        .map(|(iv, &statistic)| RegionReport {
            start: iv.start,
            end: iv.end,
            statistic,
        })
        .collect();
    let body = LocalizeBody {
        regions,
        changepoints: result.changepoints.clone(),
        threshold: ThresholdReport::from(&result.threshold),
        aggregation: kind.name(),
        scp: scp.name(),
        intervals_used: summary(&set),
        n,
        transform: prepared.transform,
        jitter: prepared.jitter,
    };
    Ok(Outcome {
        json: Report::new(config, body).to_json(),
        exit_code: EXIT_OK,
        data: None,
    })
}

/// The threshold family is always the sliding windows of half-width `h`.
pub fn run_postdetect(config: &RunConfig) -> Result<Outcome> {
    check_alpha(config)?;
    if config.intervals.kind != IntervalKind::Sliding {
        bail!("postdetect always uses sliding windows; drop --intervals or pass `sliding`");
    }
    let h = config
        .intervals
        .h
        .context("--h is required for postdetect")?;
    let path = config
        .candidates
        .as_deref()
        .context("--candidates is required for postdetect")?;
    let candidates = io::read_candidates(path)?;
    let prepared = prepare(config)?;
    let n = prepared.scores.len();
    let candidates =
        CandidateSet::new(candidates, h, n).with_context(|| format!("{path}: rejected"))?;
    let kind = AggregationKind::from(config.aggregation);
    let report = tune_filter(
        &prepared.scores,
        &candidates,
        kind,
        config.alpha,
        &plan(config)?,
    )?;
    let body = PostdetectBody {
        h,
        candidates: report.candidates,
        retained: report.retained,
        dropped: report.dropped,
        per_candidate_statistics: report.statistics,
        threshold: ThresholdReport::from(&report.threshold),
        aggregation: kind.name(),
        intervals_used: summary(&IntervalSet::sliding_windows(n, h)?),
        n,
        transform: prepared.transform,
        jitter: prepared.jitter,
    };
    Ok(Outcome {
        json: Report::new(config, body).to_json(),
        exit_code: EXIT_OK,
        data: None,
    })
}

/// Generates a design; the report echoes it and the data is returned for
/// the caller to write as CSV.
pub fn run_simulate(config: &RunConfig) -> Result<Outcome> {
    run_simulate_to(config, None)
}

pub fn run_simulate_to(config: &RunConfig, data_output: Option<&str>) -> Result<Outcome> {
    let spec = config
        .simulation
        .as_ref()
        .context("simulate needs a design")?;
    let design = ChangeDesign {
        model: spec.model.into(),
        n: spec.n,
        d: spec.d,
        changepoints: spec.changepoints.clone(),
        sparsity: spec.sparsity,
        c_theta: spec.c_theta,
        c_p: spec.c_p,
        error_law: spec.error_law.into(),
        seed: config.seed,
    };
    let sim = simulate(&design).context("invalid design")?;
    let body = SimulateBody {
        design: spec.clone(),
        parameters: sim.parameters,
        data_kind: match sim.data.kind() {
            DatasetKind::Regression => "regression",
            DatasetKind::Vector => "vector",
        },
        data_output: data_output.map(str::to_owned),
    };
    Ok(Outcome {
        json: Report::new(config, body).to_json(),
        exit_code: EXIT_OK,
        data: Some(sim.data),
    })
}
