//! Global LASSO by cyclic coordinate descent.

use alloc::vec;
use alloc::vec::Vec;

use crate::data::{Dataset, DatasetKind};
use crate::error::{ArtError, Result};
use crate::math::{fabs, log, sqrt};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    /// `λ_n = 2 √(ln d / n)`.
    Auto,
    Fixed(f64),
}

impl Penalty {
    pub fn resolve(self, n: usize, d: usize) -> f64 {
        match self {
            Penalty::Auto => 2.0 * sqrt(log(d as f64) / n as f64),
            Penalty::Fixed(lambda) => lambda,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoOptions {
    /// Sweeps stop once no coefficient moves by more than this.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for LassoOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            max_sweeps: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub coefficients: Vec<f64>,
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Final value of `(2n)⁻¹‖y − Xθ‖² + λ‖θ‖₁`.
    pub objective: f64,
}

impl LassoFit {
    /// Indices of the nonzero coefficients.
    pub fn support(&self) -> Vec<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, _)| j)
            .collect()
    }
}

/// Minimizes `(2n)⁻¹ Σ (y_i − x_iᵀθ)² + λ Σ |θ_j|` with default options.
pub fn lasso_fit(data: &Dataset, penalty: Penalty) -> Result<LassoFit> {
    lasso_fit_with(data, penalty, &LassoOptions::default())
}

pub fn lasso_fit_with(
    data: &Dataset,
    penalty: Penalty,
    options: &LassoOptions,
) -> Result<LassoFit> {
    data.require(DatasetKind::Regression)?;
    let lambda = penalty.resolve(data.n(), data.d());
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(ArtError::param(
            "lambda",
            "penalty must be finite and non-negative",
        ));
    }
    if options.max_sweeps == 0 || options.tolerance.is_nan() || options.tolerance <= 0.0 {
        return Err(ArtError::param(
            "options",
            "need positive tolerance and sweep budget",
        ));
    }
    Ok(coordinate_descent(
        &data.canonical(),
        lambda,
        options,
        |_| {},
    ))
}

fn soft_threshold(value: f64, lambda: f64) -> f64 {
    if value > lambda {
        value - lambda
    } else if value < -lambda {
        value + lambda
    } else {
        0.0
    }
}

fn objective(residual: &[f64], theta: &[f64], lambda: f64) -> f64 {
    let n = residual.len() as f64;
    let rss: f64 = residual.iter().map(|r| r * r).sum();
    rss / (2.0 * n) + lambda * theta.iter().map(|t| fabs(*t)).sum::<f64>()
}

/// The per-coordinate update divides by `‖x_j‖²/n`, which is the same as
/// running on unit-scale columns with the penalty rescaled accordingly, so the
/// iterates solve the unscaled problem directly.
pub(crate) fn coordinate_descent(
    data: &Dataset,
    lambda: f64,
    options: &LassoOptions,
    mut on_sweep: impl FnMut(f64),
) -> LassoFit {
    let (n, d) = (data.n(), data.d());
    let nf = n as f64;
    let x = data.matrix();
    let y = data.response().unwrap_or_default();

    // Column-major copy so each coordinate update streams one column.
    let mut columns = vec![0.0; n * d];
    for i in 0..n {
        for j in 0..d {
            columns[j * n + i] = x[i * d + j];
        }
    }
    let scale: Vec<f64> = columns
        .chunks_exact(n)
        .map(|c| c.iter().map(|v| v * v).sum::<f64>() / nf)
        .collect();

    let mut theta = vec![0.0; d];
    let mut residual = y.to_vec();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < options.max_sweeps {
        iterations += 1;
        let mut max_change: f64 = 0.0;
        for j in 0..d {
            let col = &columns[j * n..(j + 1) * n];
            let old = theta[j];
            let new = if scale[j] > 0.0 {
                let rho = col.iter().zip(&residual).map(|(a, r)| a * r).sum::<f64>() / nf
                    + scale[j] * old;
                soft_threshold(rho, lambda) / scale[j]
            } else {
                0.0
            };
            let delta = new - old;
            if delta != 0.0 {
                for (r, a) in residual.iter_mut().zip(col) {
                    *r -= a * delta;
                }
                theta[j] = new;
            }
            max_change = max_change.max(fabs(delta));
        }
        on_sweep(objective(&residual, &theta, lambda));
        if max_change <= options.tolerance {
            converged = true;
            break;
        }
    }
    let objective = objective(&residual, &theta, lambda);
    LassoFit {
        coefficients: theta,
        lambda,
        iterations,
        converged,
        objective,
    }
}
