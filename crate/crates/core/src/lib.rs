//! Aggregation based on Ranks of Transformed sequences (ART).
//!
//! Exact, distribution-free changepoint inference for arbitrary data. Raw
//! observations are reduced to real-valued scores by a transformation that
//! does not depend on the order of the observations; under the no-change
//! hypothesis the scores are exchangeable, so their ranks are uniform over all
//! permutations and every statistic built from ranks has a null law that can
//! be sampled exactly by drawing random permutations.
//!
//! The crate is organised bottom-up:
//!
//! * [`data`] and [`transform`] turn observations into a [`ScoreSeries`];
//! * [`rank`] computes local ranks and the two aggregation statistics
//!   (rank CUSUM and nonparametric likelihood);
//! * [`interval`] builds data-independent interval families;
//! * [`engine`] evaluates the multi-scale statistic vector, draws permutation
//!   replicates and turns them into thresholds and randomized p-values;
//! * [`localize`] runs the narrowest-over-threshold recursion;
//! * [`postdetect`] filters externally detected changepoints with FWER control;
//! * [`simgen`] generates synthetic change designs.
//!
//! The crate is `no_std` (with `alloc`) when built without the `std` feature.
//! The `parallel` feature (default) fans permutation replicates out over a
//! rayon pool; results are bit-identical for every thread count.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod data;
pub mod engine;
pub mod error;
pub mod interval;
pub mod localize;
pub mod postdetect;
pub mod rank;
pub mod simgen;
pub mod transform;

mod math;
mod rng;

pub use data::{Dataset, DatasetKind, JitterInfo, ScoreSeries};
pub use engine::{
    g_of_permutation, multiscale_stats, p_value_multi, p_value_single, threshold, PValue,
    PermutationPlan, ThresholdResult,
};
pub use error::{ArtError, Result};
pub use interval::{Interval, IntervalSet, IntervalStrategy};
pub use localize::{localize, LocalizationResult};
pub use postdetect::{tune_filter, CandidateSet, ValidationReport};
pub use rank::{
    aggregate, rank_cusum_partial_sums, scp_argmax, AggregationKind, AggregationOutcome, RankVector,
};
