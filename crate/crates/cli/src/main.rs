use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use art_cli::config::{
    AggregationSpec, Command, ErrorLawSpec, IntervalKind, IntervalSpec, ModelSpec, RunConfig,
    SimulationSpec, TransformSpec, DEFAULT_ALPHA, DEFAULT_DECAY, DEFAULT_MIN_LEN,
    DEFAULT_REPLICATES,
};
use art_cli::io;
use art_cli::run::{run, run_simulate_to, Outcome, EXIT_ERROR};

/// Distribution-free changepoint testing, localization and post-detection
/// filtering via ranks of transformed scores.
#[derive(Parser, Debug)]
#[command(name = "art", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Multi-scale test of the no-change hypothesis (exit 2 on rejection).
    Test {
        #[command(flatten)]
        common: Common,
    },
    /// Narrowest-over-threshold localization of changes.
    Localize {
        #[command(flatten)]
        common: Common,
        /// Changepoint estimator inside each region.
        #[arg(long, value_enum, default_value = "rank-cusum")]
        scp: AggregationSpec,
    },
    /// FWER-controlled filtering of externally detected changepoints.
    Postdetect {
        #[command(flatten)]
        common: Common,
        /// CSV with a `candidate` column.
        #[arg(long)]
        candidates: String,
    },
    /// Generate a synthetic change design (CSV data plus a JSON design echo).
    Simulate {
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Design report path (stdout when absent).
        #[arg(long)]
        output: Option<String>,
        /// Data CSV path.
        #[arg(long)]
        data_output: String,
    },
    /// Re-run the configuration embedded in a report.
    Replay {
        /// A report written by any command.
        #[arg(long)]
        report: String,
        #[arg(long)]
        output: Option<String>,
        /// Data CSV path when replaying `simulate`.
        #[arg(long)]
        data_output: Option<String>,
        #[arg(long, env = "ART_THREADS")]
        threads: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Observations CSV with a header row (`-` for stdin); a `y` column marks regression data.
    #[arg(long)]
    input: Option<String>,
    /// Precomputed scores CSV with a `score` column; bypasses transforms.
    #[arg(long)]
    scores: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    transform: TransformSpec,
    /// Fixed k-means cluster count (BIC selection when absent).
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long, value_enum, default_value = "rank-cusum")]
    aggregation: AggregationSpec,
    /// Interval family (default: moving if --h is given else full for test,
    /// seeded for localize, sliding for postdetect).
    #[arg(long, value_enum)]
    intervals: Option<IntervalKind>,
    /// Window half-width for moving and sliding windows.
    #[arg(long)]
    h: Option<usize>,
    /// Seeded-interval decay in (1/2, 1).
    #[arg(long, default_value_t = DEFAULT_DECAY)]
    decay: f64,
    /// Minimum length for `--intervals all`.
    #[arg(long, default_value_t = DEFAULT_MIN_LEN)]
    min_len: usize,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Number of permutation replicates.
    #[arg(long = "B", default_value_t = DEFAULT_REPLICATES)]
    replicates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Jitter scale used when scores are tied.
    #[arg(long, default_value_t = art_core::transform::DEFAULT_JITTER_EPSILON)]
    jitter_eps: f64,
    /// Report path (stdout when absent).
    #[arg(long)]
    output: Option<String>,
    #[arg(long, env = "ART_THREADS")]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct DesignArgs {
    #[arg(long, value_enum)]
    model: ModelSpec,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Comma-separated changepoints `τ*_k`.
    #[arg(long, value_delimiter = ',')]
    changepoints: Vec<usize>,
    /// Nonzero entries per parameter increment.
    #[arg(long, default_value_t = 1)]
    sparsity: usize,
    #[arg(long, default_value_t = 1.0)]
    c_theta: f64,
    #[arg(long, default_value_t = 1.0)]
    c_p: f64,
    #[arg(long, value_enum, default_value = "normal")]
    error_law: ErrorLawSpec,
}

impl Common {
    fn config(
        &self,
        command: Command,
        candidates: Option<String>,
        scp: AggregationSpec,
    ) -> RunConfig {
        let kind = self.intervals.unwrap_or(match command {
            Command::Test if self.h.is_some() => IntervalKind::Moving,
            Command::Test => IntervalKind::Full,
            Command::Postdetect => IntervalKind::Sliding,
            _ => IntervalKind::Seeded,
        });
        RunConfig {
            command,
            input: self.input.clone(),
            scores: self.scores.clone(),
            candidates,
            transform: self.transform,
            clusters: self.clusters,
            aggregation: self.aggregation,
            scp,
            intervals: IntervalSpec {
                kind,
                h: self.h,
                decay: self.decay,
                min_len: self.min_len,
            },
            alpha: self.alpha,
            replicates: self.replicates,
            seed: self.seed,
            jitter_eps: self.jitter_eps,
            simulation: None,
        }
    }
}

struct Job {
    config: RunConfig,
    output: Option<String>,
    data_output: Option<String>,
    threads: Option<usize>,
}

fn job(cli: Cli) -> Result<Job> {
    Ok(match cli.command {
        Cmd::Test { common } => Job {
            config: common.config(Command::Test, None, AggregationSpec::RankCusum),
            output: common.output,
            data_output: None,
            threads: common.threads,
        },
        Cmd::Localize { common, scp } => Job {
            config: common.config(Command::Localize, None, scp),
            output: common.output,
            data_output: None,
            threads: common.threads,
        },
        Cmd::Postdetect { common, candidates } => Job {
            config: common.config(
                Command::Postdetect,
                Some(candidates),
                AggregationSpec::RankCusum,
            ),
            output: common.output,
            data_output: None,
            threads: common.threads,
        },
        Cmd::Simulate {
            design,
            seed,
            output,
            data_output,
        } => Job {
            config: RunConfig {
                command: Command::Simulate,
                input: None,
                scores: None,
                candidates: None,
                transform: TransformSpec::Auto,
                clusters: None,
                aggregation: AggregationSpec::RankCusum,
                scp: AggregationSpec::RankCusum,
                intervals: IntervalSpec {
                    kind: IntervalKind::Full,
                    h: None,
                    decay: DEFAULT_DECAY,
                    min_len: DEFAULT_MIN_LEN,
                },
                alpha: DEFAULT_ALPHA,
                replicates: DEFAULT_REPLICATES,
                seed,
                jitter_eps: art_core::transform::DEFAULT_JITTER_EPSILON,
                simulation: Some(SimulationSpec {
                    model: design.model,
                    n: design.n,
                    d: design.d,
                    changepoints: design.changepoints,
                    sparsity: design.sparsity,
                    c_theta: design.c_theta,
                    c_p: design.c_p,
                    error_law: design.error_law,
                }),
            },
            output,
            data_output: Some(data_output),
            threads: None,
        },
        Cmd::Replay {
            report,
            output,
            data_output,
            threads,
        } => {
            let text = std::fs::read_to_string(&report)
                .with_context(|| format!("cannot read {report}"))?;
            let value: serde_json::Value =
                serde_json::from_str(&text).with_context(|| format!("{report}: not JSON"))?;
            let config = value
                .get("config")
                .cloned()
                .with_context(|| format!("{report}: no `config` field"))?;
            let config: RunConfig = serde_json::from_value(config)
                .with_context(|| format!("{report}: invalid config"))?;
            Job {
                config,
                output,
                data_output,
                threads,
            }
        }
    })
}

fn execute(job: &Job) -> Result<Outcome> {
    let work = || -> Result<Outcome> {
        if job.config.command == Command::Simulate {
            let outcome = run_simulate_to(&job.config, job.data_output.as_deref())?;
            if let (Some(path), Some(data)) = (&job.data_output, &outcome.data) {
                let mut buf = Vec::new();
                io::write_dataset(data, &mut buf)?;
                io::write_output(Some(path), &buf)?;
            }
            Ok(outcome)
        } else {
            run(&job.config)
        }
    };
    match job.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .context("cannot start thread pool")?
            .install(work),
        None => work(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = job(cli).and_then(|job| {
        let outcome = execute(&job)?;
        io::write_output(job.output.as_deref(), outcome.json.as_bytes())?;
        Ok(outcome.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
