//! Versioned JSON reports.
//!
//! Floats are written in the shortest form that parses back to the same
//! `f64`. An infinite threshold is written as `null` with `degenerate: true`.

use serde::Serialize;

use art_core::ThresholdResult;

use crate::config::RunConfig;
use crate::pipeline::{JitterReport, TransformInfo};

pub const SCHEMA: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct Report<'a, B: Serialize> {
    pub schema: u32,
    pub version: &'static str,
    pub command: crate::config::Command,
    pub config: &'a RunConfig,
    pub config_hash: String,
    pub seed: u64,
    #[serde(rename = "B")]
    pub replicates: usize,
    pub alpha: f64,
    #[serde(flatten)]
    pub body: B,
}

impl<'a, B: Serialize> Report<'a, B> {
    pub fn new(config: &'a RunConfig, body: B) -> Self {
        Self {
            schema: SCHEMA,
            version: VERSION,
            command: config.command,
            config,
            config_hash: config.hash(),
            seed: config.seed,
            replicates: config.replicates,
            alpha: config.alpha,
            body,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    /// `null` when degenerate.
    pub value: Option<f64>,
    pub order_index: usize,
    pub replicates: usize,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl From<&ThresholdResult> for ThresholdReport {
    fn from(t: &ThresholdResult) -> Self {
        let degenerate = t.is_degenerate();
        Self {
            value: (!degenerate).then_some(t.value),
            order_index: t.order_index,
            replicates: t.replicates,
            degenerate,
            warning: degenerate.then(|| {
                format!(
                    "B = {} is too small for alpha = {}: order statistic {} exceeds B, threshold is infinite",
                    t.replicates, t.alpha, t.order_index
                )
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalSummary {
    pub strategy: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestBody {
    pub p_value: f64,
    pub statistic: f64,
    pub reject: bool,
    pub replicates_above: usize,
    pub replicates_tied: usize,
    pub tie_break_u: f64,
    pub aggregation: &'static str,
    pub intervals_used: IntervalSummary,
    pub n: usize,
    pub transform: TransformInfo,
    pub jitter: JitterReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub start: usize,
    pub end: usize,
    pub statistic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizeBody {
    pub regions: Vec<RegionReport>,
    pub changepoints: Vec<usize>,
    pub threshold: ThresholdReport,
    pub aggregation: &'static str,
    pub scp: &'static str,
    pub intervals_used: IntervalSummary,
    pub n: usize,
    pub transform: TransformInfo,
    pub jitter: JitterReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PostdetectBody {
    pub h: usize,
    pub candidates: Vec<usize>,
    pub retained: Vec<usize>,
    pub dropped: Vec<usize>,
    pub per_candidate_statistics: Vec<f64>,
    pub threshold: ThresholdReport,
    pub aggregation: &'static str,
    pub intervals_used: IntervalSummary,
    pub n: usize,
    pub transform: TransformInfo,
    pub jitter: JitterReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateBody {
    pub design: crate::config::SimulationSpec,
    /// `θ*_k` per segment (empty for distributional designs).
    pub parameters: Vec<Vec<f64>>,
    pub data_kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data_output: Option<String>,
}
