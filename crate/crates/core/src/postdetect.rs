//! FWER-controlled validation of externally detected changepoints.
//!
//! Each candidate `τ̂_j` is tested on its window `(τ̂_j − h, τ̂_j + h]`. The
//! threshold is calibrated over the full sliding-window family
//! `{(ℓ − h, ℓ + h]}_{ℓ = h}^{n − h}`, so the probability of retaining any
//! candidate whose window holds no change is at most `α`.

use alloc::vec::Vec;

use crate::data::ScoreSeries;
use crate::engine::{threshold, PermutationPlan, ThresholdResult};
use crate::error::{ArtError, Result};
use crate::interval::{Interval, IntervalSet};
use crate::rank::{aggregate, AggregationKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    candidates: Vec<usize>,
    h: usize,
    n: usize,
}

impl CandidateSet {
    /// Sorts and deduplicates `candidates`; every one must satisfy
    /// `h ≤ τ̂ ≤ n − h`.
    pub fn new(mut candidates: Vec<usize>, h: usize, n: usize) -> Result<Self> {
        if h == 0 || 2 * h > n {
            return Err(ArtError::param(
                "h",
                "window half-width must satisfy 1 <= h <= n/2",
            ));
        }
        if let Some(&bad) = candidates.iter().find(|&&c| c < h || c > n - h) {
            return Err(ArtError::CandidateOutOfRange {
                candidate: bad,
                h,
                upper: n - h,
                n,
            });
        }
        candidates.sort_unstable();
        candidates.dedup();
        Ok(Self { candidates, h, n })
    }

    pub fn candidates(&self) -> &[usize] {
        &self.candidates
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn window(&self, candidate: usize) -> Interval {
        Interval {
            start: candidate - self.h,
            end: candidate + self.h,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub candidates: Vec<usize>,
    /// `T_{n,τ̂_j}` for each candidate, in candidate order.
    pub statistics: Vec<f64>,
    pub retained: Vec<usize>,
    pub dropped: Vec<usize>,
    pub threshold: ThresholdResult,
}

/// Keeps the candidates whose window statistic exceeds `t_{α,B}`.
pub fn tune_filter(
    scores: &ScoreSeries,
    candidates: &CandidateSet,
    kind: AggregationKind,
    alpha: f64,
    plan: &PermutationPlan,
) -> Result<ValidationReport> {
    if candidates.n != scores.len() {
        return Err(ArtError::LengthMismatch {
            expected: candidates.n,
            found: scores.len(),
        });
    }
    let family = IntervalSet::sliding_windows(scores.len(), candidates.h)?;
    let threshold = threshold(scores.len(), &family, kind, alpha, plan)?;
    let statistics = candidates
        .candidates
        .iter()
        .map(|&c| aggregate(scores, candidates.window(c), kind).map(|o| o.statistic))
        .collect::<Result<Vec<_>>>()?;
    let mut retained = Vec::new();
    let mut dropped = Vec::new();
    for (&c, &t) in candidates.candidates.iter().zip(&statistics) {
        if t > threshold.value {
            retained.push(c);
        } else {
            dropped.push(c);
        }
    }
    Ok(ValidationReport {
        candidates: candidates.candidates.clone(),
        statistics,
        retained,
        dropped,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn candidates_are_sorted_and_checked() {
        let set = CandidateSet::new(vec![50, 30, 50, 40], 30, 200).unwrap();
        assert_eq!(set.candidates(), &[30, 40, 50]);
        assert_eq!(
            CandidateSet::new(vec![29], 30, 200),
            Err(ArtError::CandidateOutOfRange {
                candidate: 29,
                h: 30,
                upper: 170,
                n: 200
            })
        );
        assert!(CandidateSet::new(vec![171], 30, 200).is_err());
        assert!(CandidateSet::new(vec![170, 30], 30, 200).is_ok());
        assert!(CandidateSet::new(vec![], 0, 200).is_err());
    }

    #[test]
    fn empty_candidates_still_report_threshold() {
        let scores = ScoreSeries::new((0..60).map(|i| ((i * 7) % 61) as f64).collect()).unwrap();
        let set = CandidateSet::new(vec![], 10, 60).unwrap();
        let plan = PermutationPlan::new(99, 4).unwrap();
        let r = tune_filter(&scores, &set, AggregationKind::RankCusum, 0.1, &plan).unwrap();
        assert!(r.retained.is_empty() && r.dropped.is_empty());
        assert!(r.threshold.value.is_finite());
    }

    #[test]
    fn step_is_retained_and_far_candidate_dropped() {
        let mut hits = 0;
        for seed in 0..20u64 {
            let values: Vec<f64> = (0..200)
                .map(|i| {
                    let noise = ((i as u64 * 37 + seed) % 200) as f64 / 1000.0;
                    noise + if i < 100 { 0.0 } else { 10.0 }
                })
                .collect();
            let scores = ScoreSeries::new(values).unwrap();
            let set = CandidateSet::new(vec![100, 30], 30, 200).unwrap();
            let plan = PermutationPlan::new(200, seed).unwrap();
            let r = tune_filter(&scores, &set, AggregationKind::RankCusum, 0.1, &plan).unwrap();
            if r.retained == vec![100] && r.dropped == vec![30] {
                hits += 1;
            }
        }
        assert!(hits >= 19, "{hits}");
    }

    #[test]
    fn length_must_match() {
        let scores = ScoreSeries::new((0..50).map(f64::from).collect()).unwrap();
        let set = CandidateSet::new(vec![20], 10, 60).unwrap();
        let plan = PermutationPlan::default();
        assert!(tune_filter(&scores, &set, AggregationKind::RankCusum, 0.1, &plan).is_err());
    }
}
