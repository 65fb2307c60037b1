//! Local ranks and rank aggregation statistics.
//!
//! Both aggregations read nothing but the local rank vector of an interval,
//! which is what makes their null distribution computable from uniformly
//! random permutations.

use alloc::vec::Vec;

use crate::data::ScoreSeries;
use crate::error::{ArtError, Result};
use crate::interval::Interval;
use crate::math::{log, sqrt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggregationKind {
    /// `m^{-3/2} max_t |Σ_{i≤t} (R_i − (m+1)/2)|`.
    RankCusum,
    /// Supremum over splits of the weighted integral of the two-sample
    /// nonparametric likelihood ratio.
    NpLikelihood,
}

/// Splits of the likelihood aggregation keep at least this many points on
/// each side.
pub const NP_MIN_SEGMENT: usize = 2;

/// Relative gap below the maximum within which np-likelihood splits count as
/// tied; the smallest tied split is reported.
pub const SPLIT_TIE_TOLERANCE: f64 = 1e-10;

impl AggregationKind {
    /// Shortest interval the aggregation accepts.
    pub fn min_len(self) -> usize {
        match self {
            AggregationKind::RankCusum => 2,
            AggregationKind::NpLikelihood => 2 * NP_MIN_SEGMENT,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AggregationKind::RankCusum => "rank-cusum",
            AggregationKind::NpLikelihood => "np-likelihood",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankVector {
    /// `ranks[k]` is the rank of position `interval.start + k + 1` among the
    /// covered scores.
    pub ranks: Vec<u32>,
    pub interval: Interval,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregationOutcome {
    pub statistic: f64,
    /// Absolute position `t̂` of the maximizing split: the left part is
    /// `(start, t̂]`. Always `start < t̂ < end`.
    pub split: usize,
    pub kind: AggregationKind,
}

/// Local ranks of `scores` within `interval`.
pub fn ranks(scores: &ScoreSeries, interval: Interval) -> Result<RankVector> {
    interval.check(scores.len())?;
    let mut ws = Workspace::default();
    ws.rank_scores(&scores.values()[interval.range()], interval.start)?;
    Ok(RankVector {
        ranks: ws.ranks.clone(),
        interval,
    })
}

pub fn rank_cusum(ranks: &RankVector) -> Result<AggregationOutcome> {
    check_len(ranks.ranks.len(), AggregationKind::RankCusum)?;
    Ok(rank_cusum_slice(&ranks.ranks, ranks.interval.start))
}

/// `Σ_{i≤t} (2R_i − (m + 1))` for `t = 1, …, m − 1`: twice the centred rank
/// partial sums, in exact integer arithmetic.
pub fn rank_cusum_partial_sums(ranks: &RankVector) -> Vec<i64> {
    let centre = ranks.ranks.len() as i64 + 1;
    let mut partial = 0;
    ranks.ranks[..ranks.ranks.len().saturating_sub(1)]
        .iter()
        .map(|&r| {
            partial += 2 * r as i64 - centre;
            partial
        })
        .collect()
}

/// Nonparametric-likelihood aggregation over `interval`, using the ECDF of
/// the interval itself.
pub fn np_likelihood(scores: &ScoreSeries, interval: Interval) -> Result<AggregationOutcome> {
    aggregate(scores, interval, AggregationKind::NpLikelihood)
}

pub fn np_likelihood_ranks(ranks: &RankVector) -> Result<AggregationOutcome> {
    check_len(ranks.ranks.len(), AggregationKind::NpLikelihood)?;
    let mut ws = Workspace::default();
    ws.ranks.clone_from(&ranks.ranks);
    Ok(ws.np_likelihood(ranks.interval.start))
}

/// `T = 𝔸({R_{i,ℓ} : i ∈ 𝓘_ℓ})`.
pub fn aggregate(
    scores: &ScoreSeries,
    interval: Interval,
    kind: AggregationKind,
) -> Result<AggregationOutcome> {
    interval.check(scores.len())?;
    check_len(interval.len(), kind)?;
    let mut ws = Workspace::default();
    ws.rank_scores(&scores.values()[interval.range()], interval.start)?;
    Ok(ws.aggregate(kind, interval.start))
}

/// Single-changepoint estimate inside `interval`: the maximizing split.
pub fn scp_argmax(
    scores: &ScoreSeries,
    interval: Interval,
    kind: AggregationKind,
) -> Result<usize> {
    aggregate(scores, interval, kind).map(|o| o.split)
}

/// Continuity-adjusted ECDF `(m + 1)⁻¹ (#{S_i ≤ s} + 0.5)`, always in (0, 1).
pub fn ecdf_adjusted(values: &[f64], s: f64) -> f64 {
    let below = values.iter().filter(|&&v| v <= s).count();
    (below as f64 + 0.5) / (values.len() as f64 + 1.0)
}

fn check_len(len: usize, kind: AggregationKind) -> Result<()> {
    if len < kind.min_len() {
        return Err(ArtError::IntervalTooShort {
            len,
            min: kind.min_len(),
        });
    }
    Ok(())
}

fn rank_cusum_slice(ranks: &[u32], offset: usize) -> AggregationOutcome {
    let m = ranks.len();
    // Twice the centred partial sums, in exact integer arithmetic.
    let centre = m as i64 + 1;
    let mut partial: i64 = 0;
    let mut best: i64 = -1;
    let mut split = 1;
    for (t, &r) in ranks[..m - 1].iter().enumerate() {
        partial += 2 * r as i64 - centre;
        if partial.abs() > best {
            best = partial.abs();
            split = t + 1;
        }
    }
    let mf = m as f64;
    AggregationOutcome {
        statistic: 0.5 * best as f64 / (mf * sqrt(mf)),
        split: offset + split,
        kind: AggregationKind::RankCusum,
    }
}

/// Reusable buffers for ranking and aggregating many intervals.
#[derive(Debug, Default, Clone)]
pub(crate) struct Workspace {
    keys: Vec<u64>,
    order: Vec<usize>,
    pub(crate) ranks: Vec<u32>,
    counts: Vec<u32>,
    log_half: Vec<f64>,
    log_int: Vec<f64>,
    profile: Vec<f64>,
}

impl Workspace {
    /// Ranks of distinct integers (global ranks of a permutation).
    pub(crate) fn rank_distinct(&mut self, values: &[u32]) {
        self.keys.clear();
        self.keys.extend(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| ((v as u64) << 32) | i as u64),
        );
        self.keys.sort_unstable();
        self.ranks.clear();
        self.ranks.resize(values.len(), 0);
        for (pos, key) in self.keys.iter().enumerate() {
            self.ranks[(key & 0xffff_ffff) as usize] = pos as u32 + 1;
        }
    }

    pub(crate) fn rank_scores(&mut self, values: &[f64], offset: usize) -> Result<()> {
        self.order.clear();
        self.order.extend(0..values.len());
        self.order
            .sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        for w in self.order.windows(2) {
            if values[w[0]] == values[w[1]] {
                return Err(ArtError::TiedScores {
                    first: offset + w[0].min(w[1]) + 1,
                    second: offset + w[0].max(w[1]) + 1,
                });
            }
        }
        self.ranks.clear();
        self.ranks.resize(values.len(), 0);
        for (pos, &i) in self.order.iter().enumerate() {
            self.ranks[i] = pos as u32 + 1;
        }
        Ok(())
    }

    /// Aggregates the ranks currently held in the workspace.
    pub(crate) fn aggregate(&mut self, kind: AggregationKind, offset: usize) -> AggregationOutcome {
        match kind {
            AggregationKind::RankCusum => rank_cusum_slice(&self.ranks, offset),
            AggregationKind::NpLikelihood => self.np_likelihood(offset),
        }
    }

    fn ensure_log_tables(&mut self, m: usize) {
        // log_half[k] = ln(k + 1/2), log_int[k] = ln k.
        while self.log_half.len() <= m {
            let k = self.log_half.len() as f64;
            self.log_half.push(log(k + 0.5));
        }
        while self.log_int.len() <= m + 1 {
            let k = self.log_int.len() as f64;
            self.log_int.push(log(k));
        }
    }

    /// The integral against `dF̂` is a sum over the `m` covered scores, each
    /// carrying the jump `1/(m+1)`. At the `j`-th smallest score,
    /// `F̂(s) = (j + ½)/(m + 1)`, and the side ECDFs follow from how many of
    /// the `j` smallest ranks fall left of the split.
    fn np_likelihood(&mut self, offset: usize) -> AggregationOutcome {
        let m = self.ranks.len();
        self.ensure_log_tables(m);
        let lh = &self.log_half;
        let li = &self.log_int;
        let log_total = li[m + 1];

        self.counts.clear();
        self.counts.resize(m + 1, 0);

        self.profile.clear();
        for t in 1..m - NP_MIN_SEGMENT + 1 {
            let r = self.ranks[t - 1] as usize;
            for c in &mut self.counts[r..=m] {
                *c += 1;
            }
            if t < NP_MIN_SEGMENT {
                continue;
            }
            let u = m - t;
            let (lt, lu) = (li[t + 1], li[u + 1]);
            let (tf, uf) = (t as f64, u as f64);
            let mut integral = 0.0;
            for j in 1..=m {
                let f = (j as f64 + 0.5) / (m as f64 + 1.0);
                let log_f = lh[j] - log_total;
                let log_g = lh[m - j] - log_total;

                let c = self.counts[j] as usize;
                let a = (c as f64 + 0.5) / (tf + 1.0);
                let left = a * (lh[c] - lt - log_f) + (1.0 - a) * (lh[t - c] - lt - log_g);

                let c2 = j - c;
                let b = (c2 as f64 + 0.5) / (uf + 1.0);
                let right = b * (lh[c2] - lu - log_f) + (1.0 - b) * (lh[u - c2] - lu - log_g);

                integral += (tf * left + uf * right) / (f * (1.0 - f));
            }
            self.profile.push(2.0 * integral / (m as f64 + 1.0));
        }
        let best = self
            .profile
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let floor = best - SPLIT_TIE_TOLERANCE * best.abs();
        let split = NP_MIN_SEGMENT + self.profile.iter().position(|&v| v >= floor).unwrap_or(0);
        AggregationOutcome {
            statistic: best.max(0.0),
            split: offset + split,
            kind: AggregationKind::NpLikelihood,
        }
    }
}
