//! Synthetic change designs: mean changes, regression-coefficient changes and
//! distributional changes under three noise laws.
//!
//! All randomness comes from one ChaCha8 stream keyed by the design seed and
//! Box–Muller normals, so a design reproduces bit-identically everywhere.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{ArtError, Result};
use crate::math::{exp, sqrt};
use crate::rng::{self, Gaussian};

/// Lag-one correlation of the regression covariates.
pub const REGRESSION_COVARIATE_RHO: f64 = 0.3;
/// Lag-one correlation of the dependent segments in a covariance change.
pub const COVARIANCE_CHANGE_RHO: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionChange {
    /// `𝒩(0, c_P·I)` alternating with `𝒩(0, (0.9^{|i−j|}))`.
    Covariance,
    /// `𝒩(0, I)` alternating with `t(3)^d`.
    Full,
    /// `𝒩(0, I)` alternating with `t(3)^s × 𝒩(0, 1)^{d−s}`, `s = ⌊0.4d⌋`.
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Mean,
    Regression,
    Distribution(DistributionChange),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorLaw {
    /// `c_P · 𝒩(0, 1)`.
    Normal,
    /// `t(3) / c_P`.
    StudentT3,
    /// `c_P · exp(𝒩(0, 1) / 10)`.
    LogNormal,
}

impl ErrorLaw {
    pub const ALL: [ErrorLaw; 3] = [ErrorLaw::Normal, ErrorLaw::StudentT3, ErrorLaw::LogNormal];

    pub fn name(self) -> &'static str {
        match self {
            ErrorLaw::Normal => "normal",
            ErrorLaw::StudentT3 => "t3",
            ErrorLaw::LogNormal => "lognormal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChangeDesign {
    pub model: Model,
    pub n: usize,
    pub d: usize,
    /// `0 < τ*_1 < ⋯ < τ*_K < n`; segment `k` is `(τ*_{k−1}, τ*_k]`.
    pub changepoints: Vec<usize>,
    /// Nonzero entries of each increment `D_{k,s}`.
    pub sparsity: usize,
    pub c_theta: f64,
    pub c_p: f64,
    pub error_law: ErrorLaw,
    pub seed: u64,
}

impl ChangeDesign {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(ArtError::TooFewObservations(self.n));
        }
        if self.d == 0 {
            return Err(ArtError::param("d", "must be positive"));
        }
        if self.model == Model::Regression && self.d < 3 {
            return Err(ArtError::param("d", "regression designs need d >= 3"));
        }
        if self.sparsity > self.d {
            return Err(ArtError::param("sparsity", "cannot exceed d"));
        }
        let mut last = 0;
        for &tau in &self.changepoints {
            if tau <= last || tau >= self.n {
                return Err(ArtError::param(
                    "changepoints",
                    "must be strictly increasing and inside (0, n)",
                ));
            }
            last = tau;
        }
        if !(self.c_p.is_finite() && self.c_p > 0.0) {
            return Err(ArtError::param("c_p", "must be positive and finite"));
        }
        if !self.c_theta.is_finite() {
            return Err(ArtError::param("c_theta", "must be finite"));
        }
        Ok(())
    }

    /// 0-based segment index of row `i` (0-based).
    pub fn segment_of(&self, i: usize) -> usize {
        self.changepoints.partition_point(|&tau| tau <= i)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub data: Dataset,
    /// `θ*_k` per segment for mean and regression designs; empty otherwise.
    pub parameters: Vec<Vec<f64>>,
}

/// Width of the t(3) block in a partial distributional change.
pub fn partial_change_width(d: usize) -> usize {
    d * 2 / 5
}

pub fn simulate(design: &ChangeDesign) -> Result<Simulation> {
    match design.model {
        Model::Mean => gen_mean_change(design),
        Model::Regression => gen_regression_change(design),
        Model::Distribution(_) => gen_dist_change(design),
    }
}

struct Sampler {
    gauss: Gaussian<ChaCha8Rng>,
}

impl Sampler {
    fn new(seed: u64) -> Self {
        Self {
            gauss: Gaussian::new(rng::stream(seed, rng::SIMULATION_STREAM)),
        }
    }

    fn normal(&mut self) -> f64 {
        self.gauss.sample()
    }

    /// `Z / √(χ²₃ / 3)`.
    fn t3(&mut self) -> f64 {
        let z = self.normal();
        let chi2: f64 = (0..3)
            .map(|_| {
                let z = self.normal();
                z * z
            })
            .sum();
        z / sqrt(chi2 / 3.0)
    }

    fn noise(&mut self, law: ErrorLaw, c_p: f64) -> f64 {
        match law {
            ErrorLaw::Normal => c_p * self.normal(),
            ErrorLaw::StudentT3 => self.t3() / c_p,
            ErrorLaw::LogNormal => c_p * exp(self.normal() / 10.0),
        }
    }

    /// Gaussian vector with covariance `(ρ^{|i−j|})`, built as a stationary
    /// AR(1) recursion across coordinates.
    fn ar1(&mut self, d: usize, rho: f64, out: &mut Vec<f64>) {
        let innovation = sqrt(1.0 - rho * rho);
        let mut prev = self.normal();
        out.push(prev);
        for _ in 1..d {
            prev = rho * prev + innovation * self.normal();
            out.push(prev);
        }
    }

    /// `D_{k,s}`: `s` coordinates drawn uniformly, each set to `±c_θ`.
    fn increment(&mut self, d: usize, s: usize, c_theta: f64) -> Vec<f64> {
        let mut coords: Vec<usize> = (0..d).collect();
        let rng = self.gauss.rng();
        coords.partial_shuffle(rng, s);
        let mut inc = alloc::vec![0.0; d];
        for &j in &coords[..s] {
            inc[j] = if rng.random::<bool>() {
                c_theta
            } else {
                -c_theta
            };
        }
        inc
    }

    fn parameter_path(&mut self, design: &ChangeDesign, first: Vec<f64>) -> Vec<Vec<f64>> {
        let mut path = alloc::vec![first];
        for _ in &design.changepoints {
            let inc = self.increment(design.d, design.sparsity, design.c_theta);
            let last = path.last().expect("path starts non-empty");
            let next = last.iter().zip(&inc).map(|(a, b)| a + b).collect();
            path.push(next);
        }
        path
    }
}

/// `Z_i = θ*_k + ε_i` with `θ*_1 = 0`, `θ*_{k+1} = θ*_k + D_{k,s}`.
pub fn gen_mean_change(design: &ChangeDesign) -> Result<Simulation> {
    design.validate()?;
    if design.model != Model::Mean {
        return Err(ArtError::WrongKind { expected: "mean" });
    }
    let mut sampler = Sampler::new(design.seed);
    let parameters = sampler.parameter_path(design, alloc::vec![0.0; design.d]);
    let mut x = Vec::with_capacity(design.n * design.d);
    for i in 0..design.n {
        let theta = &parameters[design.segment_of(i)];
        for &t in theta {
            x.push(t + sampler.noise(design.error_law, design.c_p));
        }
    }
    Ok(Simulation {
        data: Dataset::vector(x, design.d)?,
        parameters,
    })
}

/// `y_i = x_iᵀθ*_k + ε_i`, `x_i ~ 𝒩(0, (0.3^{|i−j|}))`,
/// `θ*_1 = (0.5, 0, 0.5, 0, …)`.
pub fn gen_regression_change(design: &ChangeDesign) -> Result<Simulation> {
    design.validate()?;
    if design.model != Model::Regression {
        return Err(ArtError::WrongKind {
            expected: "regression",
        });
    }
    let mut sampler = Sampler::new(design.seed);
    let mut first = alloc::vec![0.0; design.d];
    first[0] = 0.5;
    first[2] = 0.5;
    let parameters = sampler.parameter_path(design, first);
    let mut x = Vec::with_capacity(design.n * design.d);
    let mut y = Vec::with_capacity(design.n);
    for i in 0..design.n {
        let row_start = x.len();
        sampler.ar1(design.d, REGRESSION_COVARIATE_RHO, &mut x);
        let theta = &parameters[design.segment_of(i)];
        let mean: f64 = x[row_start..].iter().zip(theta).map(|(a, b)| a * b).sum();
        y.push(mean + sampler.noise(design.error_law, design.c_p));
    }
    Ok(Simulation {
        data: Dataset::regression(y, x, design.d)?,
        parameters,
    })
}

/// Segment laws alternate: odd segments (1-based) use the first law of the
/// pattern, even segments the second.
pub fn gen_dist_change(design: &ChangeDesign) -> Result<Simulation> {
    design.validate()?;
    let Model::Distribution(pattern) = design.model else {
        return Err(ArtError::WrongKind {
            expected: "distribution",
        });
    };
    let mut sampler = Sampler::new(design.seed);
    let d = design.d;
    let width = partial_change_width(d);
    let mut x = Vec::with_capacity(design.n * d);
    for i in 0..design.n {
        let second = design.segment_of(i) % 2 == 1;
        match (pattern, second) {
            (DistributionChange::Covariance, false) => {
                let sd = sqrt(design.c_p);
                for _ in 0..d {
                    x.push(sd * sampler.normal());
                }
            }
            (DistributionChange::Covariance, true) => sampler.ar1(d, COVARIANCE_CHANGE_RHO, &mut x),
            (DistributionChange::Full, true) => {
                for _ in 0..d {
                    x.push(sampler.t3());
                }
            }
            (DistributionChange::Partial, true) => {
                for j in 0..d {
                    x.push(if j < width {
                        sampler.t3()
                    } else {
                        sampler.normal()
                    });
                }
            }
            (_, false) => {
                for _ in 0..d {
                    x.push(sampler.normal());
                }
            }
        }
    }
    Ok(Simulation {
        data: Dataset::vector(x, d)?,
        parameters: Vec::new(),
    })
}
