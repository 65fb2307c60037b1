//! Keyed random streams.
//!
//! Every consumer draws from a ChaCha8 stream addressed by `(seed, stream id)`,
//! so replicate `b` of a permutation plan can be generated on any thread, in
//! any order, and still produce the same permutation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::{log, sqrt, TWO_PI};

/// Stream of the uniform tie-breaking variable of a randomized p-value.
pub(crate) const TIE_BREAK_STREAM: u64 = 0;
pub(crate) const JITTER_STREAM: u64 = u64::MAX;
pub(crate) const SIMULATION_STREAM: u64 = u64::MAX - 1;

pub(crate) fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Uniform draw on the open interval (0, 1).
pub(crate) fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Box–Muller standard normal sampler; the second variate of each pair is
/// cached and returned by the next call.
#[derive(Debug, Clone)]
pub(crate) struct Gaussian<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: Rng> Gaussian<R> {
    pub(crate) fn new(rng: R) -> Self {
        Self { rng, spare: None }
    }

    pub(crate) fn sample(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let radius = sqrt(-2.0 * log(open_unit(&mut self.rng)));
        let angle = TWO_PI * self.rng.random::<f64>();
        self.spare = Some(radius * libm::sin(angle));
        radius * libm::cos(angle)
    }

    pub(crate) fn rng(&mut self) -> &mut R {
        &mut self.rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_addressable() {
        let a: u64 = stream(7, 3).random();
        let b: u64 = stream(7, 3).random();
        let c: u64 = stream(7, 4).random();
        let d: u64 = stream(8, 3).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn gaussian_moments() {
        let mut g = Gaussian::new(stream(11, 0));
        let n = 200_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let z = g.sample();
            s1 += z;
            s2 += z * z;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
    }
}
