//! Half-open index intervals and data-independent interval families.

use alloc::vec::Vec;

use crate::error::{ArtError, Result};
use crate::math::{ceil_tolerant, libm_pow};

/// Positions `start + 1, …, end` of a series (1-based), written `(start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start >= end {
            return Err(ArtError::param(
                "interval",
                "start must be smaller than end",
            ));
        }
        Ok(Self { start, end })
    }

    /// `(0, n]`.
    pub fn full(n: usize) -> Self {
        Self { start: 0, end: n }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// 0-based slice range of the covered positions.
    pub fn range(&self) -> core::ops::Range<usize> {
        self.start..self.end
    }

    /// Whether a change right after position `tau` falls inside the interval,
    /// i.e. both `tau` and `tau + 1` are covered.
    pub fn straddles(&self, tau: usize) -> bool {
        self.start < tau && tau < self.end
    }

    /// `(start, end] ⊂ [lo, hi]`.
    pub fn is_within(&self, lo: usize, hi: usize) -> bool {
        lo <= self.start && self.end <= hi
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        if self.start >= self.end || self.end > n {
            return Err(ArtError::IntervalOutOfBounds {
                start: self.start,
                end: self.end,
                n,
            });
        }
        Ok(())
    }
}

impl core::fmt::Display for Interval {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "({}, {}]", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntervalStrategy {
    /// `(ℓh − h, ℓh + h]` for `ℓ = 1, …, ⌊(n − h)/h⌋`.
    MovingWindow {
        h: usize,
    },
    /// `(ℓ − h, ℓ + h]` for `ℓ = h, …, n − h`.
    SlidingWindow {
        h: usize,
    },
    /// Multi-resolution seeded intervals with geometric length decay.
    Seeded {
        decay: f64,
    },
    /// Every `(s, e]` with `e − s ≥ min_len`.
    AllSubintervals {
        min_len: usize,
    },
    Explicit,
}

/// An ordered, non-empty family of intervals inside `(0, n]` whose
/// construction depends only on `n` and the strategy parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
    strategy: IntervalStrategy,
    n: usize,
}

pub const MIN_SEEDED_LENGTH: usize = 4;

impl IntervalSet {
    pub fn explicit(n: usize, intervals: Vec<Interval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(ArtError::param("intervals", "family must not be empty"));
        }
        for iv in &intervals {
            iv.check(n)?;
        }
        Ok(Self {
            intervals,
            strategy: IntervalStrategy::Explicit,
            n,
        })
    }

    /// The single interval `(0, n]`.
    pub fn full(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(ArtError::TooFewObservations(n));
        }
        Self::explicit(n, alloc::vec![Interval::full(n)])
    }

    pub fn moving_windows(n: usize, h: usize) -> Result<Self> {
        check_half_width(n, h)?;
        let intervals = (1..=(n - h) / h)
            .map(|l| Interval {
                start: l * h - h,
                end: l * h + h,
            })
            .collect();
        Ok(Self {
            intervals,
            strategy: IntervalStrategy::MovingWindow { h },
            n,
        })
    }

    pub fn sliding_windows(n: usize, h: usize) -> Result<Self> {
        check_half_width(n, h)?;
        let intervals = (h..=n - h)
            .map(|l| Interval {
                start: l - h,
                end: l + h,
            })
            .collect();
        Ok(Self {
            intervals,
            strategy: IntervalStrategy::SlidingWindow { h },
            n,
        })
    }

    /// Layer `k = 1, 2, …` holds `2⌈decay^{-(k-1)}⌉ − 1` evenly shifted
    /// intervals of length `⌈n·decay^{k−1}⌉` (neighbours overlap by about
    /// half), down to length [`MIN_SEEDED_LENGTH`]. Duplicates are dropped,
    /// keeping the first occurrence.
    pub fn seeded(n: usize, decay: f64) -> Result<Self> {
        if n < MIN_SEEDED_LENGTH {
            return Err(ArtError::param("n", "seeded intervals need n >= 4"));
        }
        if !(decay > 0.5 && decay < 1.0) {
            return Err(ArtError::param("decay", "must lie in (1/2, 1)"));
        }
        let mut intervals: Vec<Interval> = Vec::new();
        for layer in 0.. {
            let shrink = libm_pow(decay, layer as f64);
            let len = ceil_tolerant(n as f64 * shrink) as usize;
            if len < MIN_SEEDED_LENGTH {
                break;
            }
            let count = 2 * ceil_tolerant(1.0 / shrink) as usize - 1;
            let slack = n - len;
            for i in 0..count {
                let start = if count == 1 {
                    0
                } else {
                    i * slack / (count - 1)
                };
                let iv = Interval {
                    start,
                    end: start + len,
                };
                if !intervals.contains(&iv) {
                    intervals.push(iv);
                }
            }
        }
        Ok(Self {
            intervals,
            strategy: IntervalStrategy::Seeded { decay },
            n,
        })
    }

    /// Ordered by length, then start.
    pub fn all_subintervals(n: usize, min_len: usize) -> Result<Self> {
        if !(2..=n).contains(&min_len) {
            return Err(ArtError::param("min_len", "must satisfy 2 <= min_len <= n"));
        }
        let intervals = (min_len..=n)
            .flat_map(|len| {
                (0..=n - len).map(move |s| Interval {
                    start: s,
                    end: s + len,
                })
            })
            .collect();
        Ok(Self {
            intervals,
            strategy: IntervalStrategy::AllSubintervals { min_len },
            n,
        })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn strategy(&self) -> IntervalStrategy {
        self.strategy
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn min_interval_len(&self) -> usize {
        self.intervals.iter().map(Interval::len).min().unwrap_or(0)
    }

    /// Indices `ℓ` with `(s_ℓ, e_ℓ] ⊂ [lo, hi]`.
    pub fn containment_subset(&self, lo: usize, hi: usize) -> Vec<usize> {
        self.intervals
            .iter()
            .enumerate()
            .filter(|(_, iv)| iv.is_within(lo, hi))
            .map(|(l, _)| l)
            .collect()
    }
}

fn check_half_width(n: usize, h: usize) -> Result<()> {
    if h == 0 || 2 * h > n {
        return Err(ArtError::param(
            "h",
            "window half-width must satisfy 1 <= h <= n/2",
        ));
    }
    Ok(())
}
