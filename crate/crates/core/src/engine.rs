//! Multi-scale statistics and the permutation engine.
//!
//! Under the no-change hypothesis the vector `(T_{n,1}, …, T_{n,L})` has the
//! same law as `𝔾(π)` for a uniformly random permutation `π`, where `𝔾`
//! evaluates every interval's aggregation on `π` read as the global rank
//! sequence. Replicates `π_1, …, π_B` yield the threshold `t_{α,B}` and the
//! randomized p-values.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::data::ScoreSeries;
use crate::error::{ArtError, Result};
use crate::interval::IntervalSet;
use crate::math::ceil_tolerant;
use crate::rank::{AggregationKind, Workspace};
use crate::rng;

pub const DEFAULT_REPLICATES: usize = 200;
pub const DEFAULT_ALPHA: f64 = 0.1;

/// `B` replicate permutations keyed by a master seed.
///
/// Replicate `b ∈ 1..=B` is a Fisher–Yates shuffle driven by stream `b` of
/// the seed, so it can be generated independently of every other replicate.
/// Stream 0 supplies the uniform tie-breaker of the p-values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermutationPlan {
    pub replicates: usize,
    pub master_seed: u64,
}

impl PermutationPlan {
    pub fn new(replicates: usize, master_seed: u64) -> Result<Self> {
        if replicates == 0 {
            return Err(ArtError::param("B", "at least one replicate is required"));
        }
        Ok(Self {
            replicates,
            master_seed,
        })
    }

    /// Replicate `b` (1-based) as a permutation of `1..=n`.
    pub fn permutation(&self, n: usize, b: usize) -> Vec<u32> {
        let mut pi = Vec::with_capacity(n);
        self.fill_permutation(&mut pi, n, b);
        pi
    }

    fn fill_permutation(&self, pi: &mut Vec<u32>, n: usize, b: usize) {
        pi.clear();
        pi.extend(1..=n as u32);
        pi.shuffle(&mut rng::stream(self.master_seed, b as u64));
    }

    /// The uniform `U ∈ (0, 1)` breaking ties in the randomized p-values.
    pub fn tie_break_uniform(&self) -> f64 {
        rng::open_unit(&mut rng::stream(self.master_seed, rng::TIE_BREAK_STREAM))
    }
}

impl Default for PermutationPlan {
    fn default() -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            master_seed: 0,
        }
    }
}

fn check_family(n: usize, set: &IntervalSet, kind: AggregationKind) -> Result<()> {
    if set.n() != n {
        return Err(ArtError::LengthMismatch {
            expected: set.n(),
            found: n,
        });
    }
    let shortest = set.min_interval_len();
    if shortest < kind.min_len() {
        return Err(ArtError::IntervalTooShort {
            len: shortest,
            min: kind.min_len(),
        });
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ArtError::param("alpha", "must lie in (0, 1)"));
    }
    Ok(())
}

/// `(T_{n,1}, …, T_{n,L})` in the order of the family.
pub fn multiscale_stats(
    scores: &ScoreSeries,
    set: &IntervalSet,
    kind: AggregationKind,
) -> Result<Vec<f64>> {
    check_family(scores.len(), set, kind)?;
    let mut ws = Workspace::default();
    set.intervals()
        .iter()
        .map(|iv| {
            ws.rank_scores(&scores.values()[iv.range()], iv.start)?;
            Ok(ws.aggregate(kind, iv.start).statistic)
        })
        .collect()
}

/// `𝔾(π)`: the statistic vector with `pi` (values `1..=n`) as global ranks.
pub fn g_of_permutation(pi: &[u32], set: &IntervalSet, kind: AggregationKind) -> Result<Vec<f64>> {
    check_family(pi.len(), set, kind)?;
    let n = pi.len();
    let mut seen = alloc::vec![false; n + 1];
    for &v in pi {
        let v = v as usize;
        if v == 0 || v > n || seen[v] {
            return Err(ArtError::InvalidPermutation(n));
        }
        seen[v] = true;
    }
    let mut ws = Workspace::default();
    Ok(set
        .intervals()
        .iter()
        .map(|iv| {
            ws.rank_distinct(&pi[iv.range()]);
            ws.aggregate(kind, iv.start).statistic
        })
        .collect())
}

fn max_over_family(
    pi: &[u32],
    set: &IntervalSet,
    kind: AggregationKind,
    ws: &mut Workspace,
) -> f64 {
    set.intervals()
        .iter()
        .map(|iv| {
            ws.rank_distinct(&pi[iv.range()]);
            ws.aggregate(kind, iv.start).statistic
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `‖𝔾(π_b)‖_∞` for `b = 1, …, B`, in replicate order.
pub fn replicate_max_stats(
    n: usize,
    set: &IntervalSet,
    kind: AggregationKind,
    plan: &PermutationPlan,
) -> Result<Vec<f64>> {
    check_family(n, set, kind)?;
    let one = |ws: &mut (Workspace, Vec<u32>), b: usize| {
        let (ws, pi) = ws;
        plan.fill_permutation(pi, n, b);
        max_over_family(pi, set, kind, ws)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok((1..=plan.replicates)
            .into_par_iter()
            .map_init(|| (Workspace::default(), Vec::new()), one)
            .collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut state = (Workspace::default(), Vec::new());
        Ok((1..=plan.replicates).map(|b| one(&mut state, b)).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    /// `t_{α,B}`; `+∞` when `⌈(1−α)(B+1)⌉ > B`.
    pub value: f64,
    pub alpha: f64,
    pub replicates: usize,
    /// `⌈(1−α)(B+1)⌉`, the 1-based order statistic used.
    pub order_index: usize,
    /// The `B` replicate maxima, ascending.
    pub max_stats: Vec<f64>,
}

impl ThresholdResult {
    /// True when `B` is too small for `α` and the threshold is infinite.
    pub fn is_degenerate(&self) -> bool {
        self.order_index > self.replicates
    }
}

/// `⌈(1−α)(B+1)⌉`.
pub fn threshold_index(alpha: f64, replicates: usize) -> usize {
    ceil_tolerant((1.0 - alpha) * (replicates as f64 + 1.0)) as usize
}

pub fn threshold_from_max_stats(mut max_stats: Vec<f64>, alpha: f64) -> Result<ThresholdResult> {
    check_alpha(alpha)?;
    if max_stats.is_empty() {
        return Err(ArtError::param("B", "at least one replicate is required"));
    }
    max_stats.sort_unstable_by(f64::total_cmp);
    let replicates = max_stats.len();
    let order_index = threshold_index(alpha, replicates);
    let value = if order_index > replicates {
        f64::INFINITY
    } else {
        max_stats[order_index.max(1) - 1]
    };
    Ok(ThresholdResult {
        value,
        alpha,
        replicates,
        order_index,
        max_stats,
    })
}

/// `t_{α,B}`: the `⌈(1−α)(B+1)⌉`-th smallest of the replicate maxima.
pub fn threshold(
    n: usize,
    set: &IntervalSet,
    kind: AggregationKind,
    alpha: f64,
    plan: &PermutationPlan,
) -> Result<ThresholdResult> {
    check_alpha(alpha)?;
    threshold_from_max_stats(replicate_max_stats(n, set, kind, plan)?, alpha)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue {
    pub value: f64,
    /// Observed statistic (maximum over the family).
    pub statistic: f64,
    pub replicates: usize,
    pub randomized_u: f64,
    /// Replicates strictly above the observed statistic.
    pub exceed: usize,
    /// Replicates equal to the observed statistic.
    pub ties: usize,
}

/// `(#{A_b > T} + U (1 + #{A_b = T})) / (B + 1)`.
pub fn randomized_p_value(statistic: f64, replicate_stats: &[f64], u: f64) -> PValue {
    let exceed = replicate_stats.iter().filter(|&&a| a > statistic).count();
    let ties = replicate_stats.iter().filter(|&&a| a == statistic).count();
    let b = replicate_stats.len();
    PValue {
        value: (exceed as f64 + u * (1.0 + ties as f64)) / (b as f64 + 1.0),
        statistic,
        replicates: b,
        randomized_u: u,
        exceed,
        ties,
    }
}

/// Randomized p-value of `T_{n,multi} = max_ℓ T_{n,ℓ}`.
pub fn p_value_multi(
    scores: &ScoreSeries,
    set: &IntervalSet,
    kind: AggregationKind,
    plan: &PermutationPlan,
) -> Result<PValue> {
    let observed = multiscale_stats(scores, set, kind)?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let replicates = replicate_max_stats(scores.len(), set, kind, plan)?;
    Ok(randomized_p_value(
        observed,
        &replicates,
        plan.tie_break_uniform(),
    ))
}

/// Randomized p-value of the global statistic on `(0, n]`.
pub fn p_value_single(
    scores: &ScoreSeries,
    kind: AggregationKind,
    plan: &PermutationPlan,
) -> Result<PValue> {
    p_value_multi(scores, &IntervalSet::full(scores.len())?, kind, plan)
}
