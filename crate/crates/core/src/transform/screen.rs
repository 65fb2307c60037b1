//! Order-invariant feature screening.

use alloc::vec::Vec;

use super::column_means;
use super::lasso::LassoFit;
use crate::data::Dataset;
use crate::error::{ArtError, Result};
use crate::math::{ceil_tolerant, fabs};

/// Fraction used when LASSO screening selects nothing.
pub const FALLBACK_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy)]
pub enum ScreenRule<'a> {
    /// Keep the columns whose `|sample mean|` is among the top fraction `f`;
    /// columns tied with the cut value are all kept.
    TopFraction(f64),
    /// Keep the support of a LASSO fit on the same data.
    NonzeroLasso(&'a LassoFit),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenResult {
    pub data: Dataset,
    /// Retained 0-based column indices, ascending.
    pub columns: Vec<usize>,
    /// Set when LASSO selected no column and the top-fraction rule was used.
    pub fell_back: bool,
}

pub fn screen_features(data: &Dataset, rule: ScreenRule<'_>) -> Result<ScreenResult> {
    let (columns, fell_back) = match rule {
        ScreenRule::TopFraction(f) => (top_fraction(data, f)?, false),
        ScreenRule::NonzeroLasso(fit) => {
            if fit.coefficients.len() != data.d() {
                return Err(ArtError::LengthMismatch {
                    expected: data.d(),
                    found: fit.coefficients.len(),
                });
            }
            let support = fit.support();
            if support.is_empty() {
                (top_fraction(data, FALLBACK_FRACTION)?, true)
            } else {
                (support, false)
            }
        }
    };
    Ok(ScreenResult {
        data: data.select_columns(&columns)?,
        columns,
        fell_back,
    })
}

fn top_fraction(data: &Dataset, fraction: f64) -> Result<Vec<usize>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(ArtError::param("fraction", "must lie in (0, 1]"));
    }
    let magnitude: Vec<f64> = column_means(data).into_iter().map(fabs).collect();
    let keep = (ceil_tolerant(fraction * data.d() as f64) as usize).clamp(1, data.d());
    let mut sorted = magnitude.clone();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let cut = sorted[keep - 1];
    Ok(magnitude
        .iter()
        .enumerate()
        .filter(|(_, m)| **m >= cut)
        .map(|(j, _)| j)
        .collect())
}
