//! Narrowest-over-threshold localization.
//!
//! The statistics `T_{n,ℓ}` and the threshold `t_{α,B}` are computed once for
//! the whole family. The recursion `NOT(s, e)` then looks only at intervals
//! contained in `[s, e]`, selects the narrowest one whose statistic exceeds
//! the threshold, places a changepoint inside it and recurses on the two
//! remaining sides.

use alloc::vec::Vec;

use crate::data::ScoreSeries;
use crate::engine::{multiscale_stats, threshold, PermutationPlan, ThresholdResult};
use crate::error::{ArtError, Result};
use crate::interval::{Interval, IntervalSet};
use crate::rank::{scp_argmax, AggregationKind};

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationResult {
    /// Selected regions, sorted by start.
    pub regions: Vec<Interval>,
    /// One estimate per region, strictly inside it.
    pub changepoints: Vec<usize>,
    pub region_statistics: Vec<f64>,
    /// Family indices of the regions in the order the recursion chose them.
    pub trace: Vec<usize>,
    pub threshold: ThresholdResult,
    pub alpha: f64,
    pub replicates: usize,
    pub seed: u64,
    /// Set when `B` is too small for `α`; the result is then empty.
    pub degenerate: bool,
}

/// Runs the recursion on precomputed statistics and returns the selected
/// family indices in selection order.
pub fn narrowest_over_threshold(set: &IntervalSet, stats: &[f64], threshold: f64) -> Vec<usize> {
    let intervals = set.intervals();
    let mut selected = Vec::new();
    let mut stack = alloc::vec![(0, set.n())];
    while let Some((s, e)) = stack.pop() {
        if e <= s + 1 {
            continue;
        }
        let best = set
            .containment_subset(s, e)
            .into_iter()
            .filter(|&l| stats[l] > threshold)
            .min_by_key(|&l| (intervals[l].len(), intervals[l].start, l));
        let Some(l) = best else { continue };
        selected.push(l);
        let chosen = intervals[l];
        stack.push((chosen.end, e));
        stack.push((s, chosen.start));
    }
    selected
}

/// Localization with the rank-CUSUM argmax as the within-region estimator.
pub fn localize(
    scores: &ScoreSeries,
    set: &IntervalSet,
    kind: AggregationKind,
    alpha: f64,
    plan: &PermutationPlan,
) -> Result<LocalizationResult> {
    localize_with(scores, set, kind, alpha, plan, AggregationKind::RankCusum)
}

/// Localization with a chosen within-region estimator `scp`.
pub fn localize_with(
    scores: &ScoreSeries,
    set: &IntervalSet,
    kind: AggregationKind,
    alpha: f64,
    plan: &PermutationPlan,
    scp: AggregationKind,
) -> Result<LocalizationResult> {
    if set.min_interval_len() < scp.min_len() {
        return Err(ArtError::IntervalTooShort {
            len: set.min_interval_len(),
            min: scp.min_len(),
        });
    }
    let stats = multiscale_stats(scores, set, kind)?;
    let threshold = threshold(scores.len(), set, kind, alpha, plan)?;
    let degenerate = threshold.is_degenerate();
    let trace = if degenerate {
        Vec::new()
    } else {
        narrowest_over_threshold(set, &stats, threshold.value)
    };

    let mut chosen: Vec<usize> = trace.clone();
    chosen.sort_by_key(|&l| set.intervals()[l].start);
    let regions: Vec<Interval> = chosen.iter().map(|&l| set.intervals()[l]).collect();
    let changepoints = regions
        .iter()
        .map(|&iv| scp_argmax(scores, iv, scp))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalizationResult {
        regions,
        changepoints,
        region_statistics: chosen.iter().map(|&l| stats[l]).collect(),
        trace,
        threshold,
        alpha,
        replicates: plan.replicates,
        seed: plan.master_seed,
        degenerate,
    })
}
