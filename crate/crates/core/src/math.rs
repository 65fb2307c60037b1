//! Float helpers that work without `std`.

use core::cmp::Ordering;

pub(crate) use libm::{exp, fabs, log, pow as libm_pow, sqrt};

pub(crate) const TWO_PI: f64 = core::f64::consts::TAU;

/// Ceiling that ignores representation error just above an integer,
/// e.g. `0.95 * 200.0` or `8.0 * 0.5000000000000001`.
pub(crate) fn ceil_tolerant(x: f64) -> f64 {
    let r = libm::round(x);
    if fabs(x - r) <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        libm::ceil(x)
    }
}

/// Sum whose result depends only on the multiset of inputs.
pub(crate) fn symmetric_sum(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    values.iter().sum()
}

pub(crate) fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
