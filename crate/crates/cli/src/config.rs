//! Resolved run configuration. Everything that can change a report lives
//! here; output paths and thread counts do not.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use art_core::simgen::{DistributionChange, ErrorLaw, Model};
use art_core::AggregationKind;

pub const DEFAULT_ALPHA: f64 = art_core::engine::DEFAULT_ALPHA;
pub const DEFAULT_REPLICATES: usize = art_core::engine::DEFAULT_REPLICATES;
pub const DEFAULT_DECAY: f64 = std::f64::consts::FRAC_1_SQRT_2;
pub const DEFAULT_MIN_LEN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Test,
    Localize,
    Postdetect,
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TransformSpec {
    /// Identity for one column, k-means for several, residuals for regression.
    Auto,
    Identity,
    GaussianDeviance,
    Residual,
    Kmeans,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AggregationSpec {
    RankCusum,
    NpLikelihood,
}

impl From<AggregationSpec> for AggregationKind {
    fn from(spec: AggregationSpec) -> Self {
        match spec {
            AggregationSpec::RankCusum => AggregationKind::RankCusum,
            AggregationSpec::NpLikelihood => AggregationKind::NpLikelihood,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalKind {
    /// `(ℓh − h, ℓh + h]` for `ℓ = 1..⌊(n − h)/h⌋`.
    Moving,
    /// `(ℓ − h, ℓ + h]` for `ℓ = h..n − h`.
    Sliding,
    Seeded,
    /// Every interval of length at least `min_len`.
    All,
    /// The single interval `(0, n]`.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub kind: IntervalKind,
    pub h: Option<usize>,
    pub decay: f64,
    pub min_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelSpec {
    Mean,
    Regression,
    Covariance,
    Full,
    Partial,
}

impl From<ModelSpec> for Model {
    fn from(spec: ModelSpec) -> Self {
        match spec {
            ModelSpec::Mean => Model::Mean,
            ModelSpec::Regression => Model::Regression,
            ModelSpec::Covariance => Model::Distribution(DistributionChange::Covariance),
            ModelSpec::Full => Model::Distribution(DistributionChange::Full),
            ModelSpec::Partial => Model::Distribution(DistributionChange::Partial),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorLawSpec {
    Normal,
    T3,
    Lognormal,
}

impl From<ErrorLawSpec> for ErrorLaw {
    fn from(spec: ErrorLawSpec) -> Self {
        match spec {
            ErrorLawSpec::Normal => ErrorLaw::Normal,
            ErrorLawSpec::T3 => ErrorLaw::StudentT3,
            ErrorLawSpec::Lognormal => ErrorLaw::LogNormal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub model: ModelSpec,
    pub n: usize,
    pub d: usize,
    pub changepoints: Vec<usize>,
    pub sparsity: usize,
    pub c_theta: f64,
    pub c_p: f64,
    pub error_law: ErrorLawSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    /// Observations CSV (`-` for stdin).
    pub input: Option<String>,
    /// Precomputed scores CSV with a `score` column; bypasses transforms.
    pub scores: Option<String>,
    /// Candidate changepoints CSV with a `candidate` column.
    pub candidates: Option<String>,
    pub transform: TransformSpec,
    /// Fixed k-means cluster count; BIC selection over `1..=8` when absent.
    pub clusters: Option<usize>,
    pub aggregation: AggregationSpec,
    /// Within-region changepoint estimator for `localize`.
    pub scp: AggregationSpec,
    pub intervals: IntervalSpec,
    pub alpha: f64,
    #[serde(rename = "B")]
    pub replicates: usize,
    pub seed: u64,
    pub jitter_eps: f64,
    pub simulation: Option<SimulationSpec>,
}

impl RunConfig {
    /// SHA-256 of the compact JSON encoding, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}
