//! From a config to ranked-ready scores and an interval family.

use anyhow::{bail, Context, Result};
use serde::Serialize;

use art_core::transform::{
    gaussian_deviance_scores_at_mean, identity_scores, jitter_if_tied, kmeans, lasso_fit,
    residual_scores, screen_features, ClusterCount, KMeansConfig, KMeansLoss, Penalty, ScreenRule,
};
use art_core::{Dataset, DatasetKind, IntervalSet, ScoreSeries};

use crate::config::{IntervalKind, IntervalSpec, RunConfig, TransformSpec};
use crate::io;

/// Vector data with at least this many columns is screened to the top 10%
/// of `|sample mean|` before k-means.
pub const SCREEN_MIN_DIMENSION: usize = 10;
pub const SCREEN_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformInfo {
    /// `precomputed` when scores were read directly.
    pub name: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lasso_lambda: Option<f64>,
    /// Retained 0-based covariate columns after screening.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub screened_columns: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clusters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bic: Option<f64>,
}

impl TransformInfo {
    fn named(name: &'static str) -> Self {
        Self {
            name,
            lasso_lambda: None,
            screened_columns: None,
            clusters: None,
            bic: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JitterReport {
    pub applied: bool,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Prepared {
    pub scores: ScoreSeries,
    pub transform: TransformInfo,
    pub jitter: JitterReport,
}

/// `Auto` resolves to identity for one column, k-means for several and
/// LASSO residuals for regression data.
pub fn resolve_transform(spec: TransformSpec, data: &Dataset) -> TransformSpec {
    match (spec, data.kind()) {
        (TransformSpec::Auto, DatasetKind::Regression) => TransformSpec::Residual,
        (TransformSpec::Auto, DatasetKind::Vector) if data.d() == 1 => TransformSpec::Identity,
        (TransformSpec::Auto, DatasetKind::Vector) => TransformSpec::Kmeans,
        (other, _) => other,
    }
}

pub fn transform(
    data: &Dataset,
    spec: TransformSpec,
    clusters: Option<usize>,
) -> Result<(ScoreSeries, TransformInfo)> {
    let cluster_count = match clusters {
        Some(k) => ClusterCount::Fixed(k),
        None => ClusterCount::Auto {
            max: art_core::transform::DEFAULT_MAX_CLUSTERS,
        },
    };
    Ok(match resolve_transform(spec, data) {
        TransformSpec::Identity => (identity_scores(data)?, TransformInfo::named("identity")),
        TransformSpec::GaussianDeviance => (
            gaussian_deviance_scores_at_mean(data)?,
            TransformInfo::named("gaussian-deviance"),
        ),
        TransformSpec::Residual => {
            let fit = lasso_fit(data, Penalty::Auto)?;
            let mut info = TransformInfo::named("residual");
            info.lasso_lambda = Some(fit.lambda);
            (residual_scores(data, &fit.coefficients)?, info)
        }
        TransformSpec::Kmeans => {
            let mut info = TransformInfo::named("kmeans");
            let (screened, loss) = match data.kind() {
                DatasetKind::Regression => {
                    let fit = lasso_fit(data, Penalty::Auto)?;
                    info.lasso_lambda = Some(fit.lambda);
                    let s = screen_features(data, ScreenRule::NonzeroLasso(&fit))?;
                    info.screened_columns = Some(s.columns);
                    (s.data, KMeansLoss::RegressionResidual)
                }
                DatasetKind::Vector if data.d() >= SCREEN_MIN_DIMENSION => {
                    let s = screen_features(data, ScreenRule::TopFraction(SCREEN_FRACTION))?;
                    info.screened_columns = Some(s.columns);
                    (s.data, KMeansLoss::SquaredEuclidean)
                }
                DatasetKind::Vector => (data.clone(), KMeansLoss::SquaredEuclidean),
            };
            let config = KMeansConfig {
                clusters: cluster_count,
                loss,
                ..KMeansConfig::default()
            };
            let result = kmeans(&screened, &config)?;
            info.clusters = Some(result.k);
            info.bic = result.bic;
            (result.scores(), info)
        }
        TransformSpec::Auto => unreachable!("auto is resolved above"),
    })
}

pub fn prepare(config: &RunConfig) -> Result<Prepared> {
    let (raw, transform_info) = match (&config.input, &config.scores) {
        (Some(_), Some(_)) => bail!("give either --input or --scores, not both"),
        (None, None) => bail!("one of --input or --scores is required"),
        (None, Some(path)) => (io::read_scores(path)?, TransformInfo::named("precomputed")),
        (Some(path), None) => {
            let data = io::read_dataset(path)?;
            transform(&data, config.transform, config.clusters)
                .with_context(|| format!("{path}: transform failed"))?
        }
    };
    let scores = jitter_if_tied(raw, config.jitter_eps, config.seed)?;
    let jitter = match scores.jitter_info() {
        Some(info) => JitterReport {
            applied: true,
            epsilon: Some(info.epsilon),
            seed: Some(info.seed),
        },
        None => JitterReport {
            applied: false,
            epsilon: None,
            seed: None,
        },
    };
    Ok(Prepared {
        scores,
        transform: transform_info,
        jitter,
    })
}

pub fn build_intervals(spec: &IntervalSpec, n: usize) -> Result<IntervalSet> {
    let need_h = || {
        spec.h
            .with_context(|| format!("--h is required for {:?} windows", spec.kind).to_lowercase())
    };
    let set = match spec.kind {
        IntervalKind::Moving => IntervalSet::moving_windows(n, need_h()?),
        IntervalKind::Sliding => IntervalSet::sliding_windows(n, need_h()?),
        IntervalKind::Seeded => IntervalSet::seeded(n, spec.decay),
        IntervalKind::All => IntervalSet::all_subintervals(n, spec.min_len),
        IntervalKind::Full => IntervalSet::full(n),
    };
    Ok(set?)
}
