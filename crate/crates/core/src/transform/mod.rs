//! Order-symmetric transformations from observations to scores.
//!
//! Every fitted quantity (sample means, LASSO coefficients, cluster models)
//! is computed on the rows sorted into a canonical order, so a transformation
//! applied to any row permutation of a dataset returns the permuted scores,
//! bit for bit.

mod kmeans;
mod lasso;
mod screen;

use alloc::vec::Vec;

pub use kmeans::{
    kmeans, ClusterCount, KMeansConfig, KMeansLoss, KMeansResult, DEFAULT_MAX_CLUSTERS,
    DEFAULT_MAX_ITER,
};
pub use lasso::{lasso_fit, lasso_fit_with, LassoFit, LassoOptions, Penalty};
pub use screen::{screen_features, ScreenResult, ScreenRule};

use crate::data::{Dataset, DatasetKind, JitterInfo, ScoreSeries};
use crate::error::{ArtError, Result};
use crate::math::{dot, exp, fabs, log, squared_distance, symmetric_sum, TWO_PI};
use crate::rng::{self, Gaussian};

/// Default jitter scale.
pub const DEFAULT_JITTER_EPSILON: f64 = 1e-6;

/// Jitter draws are redrawn until `|e| ≤ JITTER_TRUNCATION`.
pub const JITTER_TRUNCATION: f64 = 6.0;

/// `S_i = Z_i` for univariate data.
pub fn identity_scores(data: &Dataset) -> Result<ScoreSeries> {
    data.require(DatasetKind::Vector)?;
    if data.d() != 1 {
        return Err(ArtError::Dimension {
            expected: 1,
            found: data.d(),
        });
    }
    ScoreSeries::new(data.matrix().to_vec())
}

/// Column-wise sample mean, independent of row order.
pub fn column_means(data: &Dataset) -> Vec<f64> {
    let n = data.n();
    let mut column = Vec::with_capacity(n);
    (0..data.d())
        .map(|j| {
            column.clear();
            column.extend(data.rows().map(|row| row[j]));
            symmetric_sum(&mut column) / n as f64
        })
        .collect()
}

/// `S_i = −φ_d(Z_i − θ)` with `φ_d` the standard `d`-variate normal density.
pub fn gaussian_deviance_scores(data: &Dataset, theta: &[f64]) -> Result<ScoreSeries> {
    data.require(DatasetKind::Vector)?;
    if theta.len() != data.d() {
        return Err(ArtError::LengthMismatch {
            expected: data.d(),
            found: theta.len(),
        });
    }
    let log_norm = -0.5 * data.d() as f64 * log(TWO_PI);
    let scores = data
        .rows()
        .map(|z| -exp(log_norm - 0.5 * squared_distance(z, theta)))
        .collect();
    ScoreSeries::new(scores)
}

/// Gaussian deviance around the column-wise sample mean.
pub fn gaussian_deviance_scores_at_mean(data: &Dataset) -> Result<ScoreSeries> {
    gaussian_deviance_scores(data, &column_means(data))
}

/// Squared residuals `S_i = (y_i − x_iᵀθ)²`.
pub fn residual_scores(data: &Dataset, theta: &[f64]) -> Result<ScoreSeries> {
    data.require(DatasetKind::Regression)?;
    if theta.len() != data.d() {
        return Err(ArtError::LengthMismatch {
            expected: data.d(),
            found: theta.len(),
        });
    }
    let y = data.response().unwrap_or_default();
    let scores = data
        .rows()
        .zip(y)
        .map(|(x, &y)| {
            let r = y - dot(x, theta);
            r * r
        })
        .collect();
    ScoreSeries::new(scores)
}

/// Adds `ε e_i` with `e_i` truncated standard normal draws (`|e_i| ≤ 6`).
///
/// The draws come from a dedicated stream keyed by `seed` and are indexed by
/// position, so they do not depend on the score values.
pub fn jitter(scores: &ScoreSeries, epsilon: f64, seed: u64) -> Result<ScoreSeries> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(ArtError::param(
            "epsilon",
            "jitter scale must be positive and finite",
        ));
    }
    let mut normal = Gaussian::new(rng::stream(seed, rng::JITTER_STREAM));
    let values = scores
        .values()
        .iter()
        .map(|&s| {
            let e = loop {
                let e = normal.sample();
                if fabs(e) <= JITTER_TRUNCATION {
                    break e;
                }
            };
            s + epsilon * e
        })
        .collect();
    Ok(ScoreSeries::jittered(values, JitterInfo { epsilon, seed }))
}

/// Jitters only when some scores are tied; otherwise returns the input.
pub fn jitter_if_tied(scores: ScoreSeries, epsilon: f64, seed: u64) -> Result<ScoreSeries> {
    if scores.has_ties() {
        jitter(&scores, epsilon, seed)
    } else {
        Ok(scores)
    }
}
