//! Observations and the score series derived from them.

use alloc::vec::Vec;

use crate::error::{ArtError, Result};
use crate::math::lexicographic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    /// `n × d` real matrix, one observation per row.
    Vector,
    /// Response `y` with an `n × d` design matrix.
    Regression,
}

/// A sequence of `n ≥ 2` finite observations.
///
/// Rows are stored row-major in `x`; for regression data `y` holds the
/// responses.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    kind: DatasetKind,
    n: usize,
    d: usize,
    x: Vec<f64>,
    y: Option<Vec<f64>>,
}

impl Dataset {
    /// Row-major `n × d` matrix.
    pub fn vector(x: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(ArtError::param("d", "dimension must be at least 1"));
        }
        if !x.len().is_multiple_of(d) {
            return Err(ArtError::LengthMismatch {
                expected: (x.len() / d + 1) * d,
                found: x.len(),
            });
        }
        let n = x.len() / d;
        check_size_and_finite(&x, n, d)?;
        Ok(Self {
            kind: DatasetKind::Vector,
            n,
            d,
            x,
            y: None,
        })
    }

    /// A univariate sequence.
    pub fn univariate(values: &[f64]) -> Result<Self> {
        Self::vector(values.to_vec(), 1)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let mut x = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(ArtError::LengthMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            x.extend_from_slice(row);
        }
        if rows.len() < 2 {
            return Err(ArtError::TooFewObservations(rows.len()));
        }
        Self::vector(x, d)
    }

    /// Regression data: responses `y` and a row-major design matrix with `d` columns.
    pub fn regression(y: Vec<f64>, x: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(ArtError::param("d", "dimension must be at least 1"));
        }
        if x.len() != y.len() * d {
            return Err(ArtError::LengthMismatch {
                expected: y.len() * d,
                found: x.len(),
            });
        }
        let n = y.len();
        check_size_and_finite(&x, n, d)?;
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(ArtError::NonFinite { row: i, column: 0 });
        }
        Ok(Self {
            kind: DatasetKind::Regression,
            n,
            d,
            x,
            y: Some(y),
        })
    }

    pub fn kind(&self) -> DatasetKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Covariates (regression) or the observation itself (vector).
    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.x.chunks_exact(self.d)
    }

    pub fn response(&self) -> Option<&[f64]> {
        self.y.as_deref()
    }

    pub fn matrix(&self) -> &[f64] {
        &self.x
    }

    pub(crate) fn require(&self, kind: DatasetKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(ArtError::WrongKind {
                expected: match kind {
                    DatasetKind::Vector => "vector",
                    DatasetKind::Regression => "regression",
                },
            })
        }
    }

    fn full_row_cmp(&self, a: usize, b: usize) -> core::cmp::Ordering {
        if let Some(y) = &self.y {
            let c = y[a].total_cmp(&y[b]);
            if c.is_ne() {
                return c;
            }
        }
        lexicographic(self.row(a), self.row(b))
    }

    /// Row indices in lexicographic order of `(y, x)`.
    ///
    /// Fitting on the rows in this order makes every fitted quantity a
    /// function of the multiset of observations alone, bit for bit.
    pub(crate) fn canonical_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| self.full_row_cmp(a, b));
        order
    }

    pub(crate) fn reordered(&self, order: &[usize]) -> Self {
        let mut x = Vec::with_capacity(self.x.len());
        for &i in order {
            x.extend_from_slice(self.row(i));
        }
        let y = self
            .y
            .as_ref()
            .map(|y| order.iter().map(|&i| y[i]).collect());
        Self {
            kind: self.kind,
            n: order.len(),
            d: self.d,
            x,
            y,
        }
    }

    pub(crate) fn canonical(&self) -> Self {
        self.reordered(&self.canonical_order())
    }

    /// Keeps the listed columns (0-based, in the given order).
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return Err(ArtError::param(
                "columns",
                "at least one column must be kept",
            ));
        }
        if let Some(&c) = columns.iter().find(|&&c| c >= self.d) {
            return Err(ArtError::Dimension {
                expected: self.d,
                found: c + 1,
            });
        }
        let mut x = Vec::with_capacity(self.n * columns.len());
        for row in self.rows() {
            x.extend(columns.iter().map(|&c| row[c]));
        }
        Ok(Self {
            kind: self.kind,
            n: self.n,
            d: columns.len(),
            x,
            y: self.y.clone(),
        })
    }
}

fn check_size_and_finite(x: &[f64], n: usize, d: usize) -> Result<()> {
    if n < 2 {
        return Err(ArtError::TooFewObservations(n));
    }
    if let Some(k) = x.iter().position(|v| !v.is_finite()) {
        return Err(ArtError::NonFinite {
            row: k / d,
            column: k % d,
        });
    }
    Ok(())
}

/// Provenance of the tie-breaking perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterInfo {
    pub epsilon: f64,
    pub seed: u64,
}

/// Real-valued scores `S_1, …, S_n`, one per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSeries {
    scores: Vec<f64>,
    jitter: Option<JitterInfo>,
}

impl ScoreSeries {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if scores.len() < 2 {
            return Err(ArtError::TooFewObservations(scores.len()));
        }
        if let Some(i) = scores.iter().position(|v| !v.is_finite()) {
            return Err(ArtError::NonFinite { row: i, column: 0 });
        }
        Ok(Self {
            scores,
            jitter: None,
        })
    }

    pub(crate) fn jittered(scores: Vec<f64>, info: JitterInfo) -> Self {
        Self {
            scores,
            jitter: Some(info),
        }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.scores
    }

    pub fn into_values(self) -> Vec<f64> {
        self.scores
    }

    pub fn jitter_info(&self) -> Option<JitterInfo> {
        self.jitter
    }

    pub fn jitter_applied(&self) -> bool {
        self.jitter.is_some()
    }

    /// True when two scores compare equal.
    pub fn has_ties(&self) -> bool {
        let mut sorted = self.scores.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        sorted.windows(2).any(|w| w[0] == w[1])
    }
}
