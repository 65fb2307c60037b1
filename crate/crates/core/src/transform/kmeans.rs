//! K-means clustering for parametric models with an order-invariant
//! initialization and BIC selection of the number of clusters.
//!
//! Membership assignment and parameter estimation alternate until the
//! memberships stop changing. Initialization starts from the sample mean and
//! adds the point farthest from the chosen centroids; ties between equally
//! distant points go to the lexicographically smallest point, never to the
//! lowest row index, so labels depend only on the multiset of observations.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use crate::data::{Dataset, DatasetKind, ScoreSeries};
use crate::error::{ArtError, Result};
use crate::math::{dot, lexicographic, log, squared_distance};

pub const DEFAULT_MAX_CLUSTERS: usize = 8;
pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KMeansLoss {
    /// `ρ(z, f) = ‖z − f‖²`, centroids are cluster means.
    SquaredEuclidean,
    /// `ρ((y, x), f) = (y − xᵀf)²`, centroids are per-cluster least squares fits.
    RegressionResidual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterCount {
    Fixed(usize),
    /// Minimize BIC over `K ∈ 1..=max`.
    Auto {
        max: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansConfig {
    pub clusters: ClusterCount,
    pub loss: KMeansLoss,
    pub max_iter: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            clusters: ClusterCount::Auto {
                max: DEFAULT_MAX_CLUSTERS,
            },
            loss: KMeansLoss::SquaredEuclidean,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Cluster label of each observation, in `1..=k`, in input row order.
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub k: usize,
    /// BIC of the selected `k` when it was chosen automatically.
    pub bic: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub total_loss: f64,
}

impl KMeansResult {
    /// Labels as real-valued scores (ties are expected; jitter before ranking).
    pub fn scores(&self) -> ScoreSeries {
        ScoreSeries::new(self.labels.iter().map(|&l| l as f64).collect())
            .expect("labels are finite and n >= 2")
    }
}

pub fn kmeans(data: &Dataset, config: &KMeansConfig) -> Result<KMeansResult> {
    if config.loss == KMeansLoss::RegressionResidual {
        data.require(DatasetKind::Regression)?;
    }
    if config.max_iter == 0 {
        return Err(ArtError::param("max_iter", "must be at least 1"));
    }
    let order = data.canonical_order();
    let canon = data.reordered(&order);
    let problem = Problem::new(&canon, config.loss);
    let n = data.n();

    let (fit, bic) = match config.clusters {
        ClusterCount::Fixed(k) => {
            if k == 0 {
                return Err(ArtError::param("k", "must be at least 1"));
            }
            if k > n {
                return Err(ArtError::TooManyClusters { clusters: k, n });
            }
            (problem.run(k, config.max_iter, |_| {}), None)
        }
        ClusterCount::Auto { max } => {
            if max == 0 {
                return Err(ArtError::param("k_max", "must be at least 1"));
            }
            let mut best: Option<(Fit, f64)> = None;
            for k in 1..=max.min(n) {
                let fit = problem.run(k, config.max_iter, |_| {});
                let bic = problem.bic(&fit);
                if best.as_ref().is_none_or(|(_, b)| bic < *b) {
                    best = Some((fit, bic));
                }
            }
            let (fit, bic) = best.expect("at least one candidate k");
            (fit, Some(bic))
        }
    };

    let mut labels = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        labels[row] = fit.labels[pos] + 1;
    }
    Ok(KMeansResult {
        labels,
        k: fit.centroids.len(),
        centroids: fit.centroids,
        bic,
        iterations: fit.iterations,
        converged: fit.converged,
        total_loss: fit.total_loss,
    })
}

#[derive(Debug, Clone)]
struct Fit {
    labels: Vec<usize>,
    centroids: Vec<Vec<f64>>,
    iterations: usize,
    converged: bool,
    total_loss: f64,
}

/// Rows of a canonically ordered dataset together with the loss.
struct Problem<'a> {
    data: &'a Dataset,
    loss: KMeansLoss,
}

impl<'a> Problem<'a> {
    fn new(data: &'a Dataset, loss: KMeansLoss) -> Self {
        Self { data, loss }
    }

    fn n(&self) -> usize {
        self.data.n()
    }

    fn response(&self, i: usize) -> f64 {
        self.data.response().map_or(0.0, |y| y[i])
    }

    fn rho(&self, i: usize, f: &[f64]) -> f64 {
        match self.loss {
            KMeansLoss::SquaredEuclidean => squared_distance(self.data.row(i), f),
            KMeansLoss::RegressionResidual => {
                let r = self.response(i) - dot(self.data.row(i), f);
                r * r
            }
        }
    }

    fn row_cmp(&self, a: usize, b: usize) -> Ordering {
        self.response(a)
            .total_cmp(&self.response(b))
            .then_with(|| lexicographic(self.data.row(a), self.data.row(b)))
    }

    fn assign(&self, centroids: &[Vec<f64>]) -> Vec<usize> {
        (0..self.n())
            .map(|i| {
                let mut best = 0;
                let mut best_loss = f64::INFINITY;
                for (j, f) in centroids.iter().enumerate() {
                    let l = self.rho(i, f);
                    if l < best_loss {
                        best = j;
                        best_loss = l;
                    }
                }
                best
            })
            .collect()
    }

    fn total_loss(&self, labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
        labels
            .iter()
            .enumerate()
            .map(|(i, &g)| self.rho(i, &centroids[g]))
            .sum()
    }

    fn fit_members(&self, members: &[usize]) -> Vec<f64> {
        let d = self.data.d();
        match self.loss {
            KMeansLoss::SquaredEuclidean => {
                let mut mean = vec![0.0; d];
                for &i in members {
                    for (m, v) in mean.iter_mut().zip(self.data.row(i)) {
                        *m += v;
                    }
                }
                let m = members.len() as f64;
                mean.iter_mut().for_each(|v| *v /= m);
                mean
            }
            KMeansLoss::RegressionResidual => {
                let mut x = Vec::with_capacity(members.len() * d);
                for &i in members {
                    x.extend_from_slice(self.data.row(i));
                }
                let y: Vec<f64> = members.iter().map(|&i| self.response(i)).collect();
                least_squares(&x, &y, d)
            }
        }
    }

    /// Parameter estimation step. Empty clusters are reseeded at the point
    /// (and its duplicates) farthest from its assigned centroid.
    fn estimate(&self, labels: &mut [usize], centroids: &mut [Vec<f64>]) {
        let k = centroids.len();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, &g) in labels.iter().enumerate() {
            members[g].push(i);
        }
        for j in 0..k {
            if !members[j].is_empty() {
                centroids[j] = self.fit_members(&members[j]);
            }
        }
        while let Some(empty) = (0..k).find(|&j| !labels.contains(&j)) {
            let mut far: Option<(usize, f64)> = None;
            for i in 0..self.n() {
                let l = self.rho(i, &centroids[labels[i]]);
                let better = match far {
                    None => true,
                    Some((fi, fl)) => l > fl || (l == fl && self.row_cmp(i, fi).is_lt()),
                };
                if better {
                    far = Some((i, l));
                }
            }
            let Some((far, _)) = far.filter(|(_, l)| *l > 0.0) else {
                break;
            };
            let moved: Vec<usize> = (0..self.n())
                .filter(|&i| self.row_cmp(i, far).is_eq())
                .collect();
            for &i in &moved {
                labels[i] = empty;
            }
            centroids[empty] = self.fit_members(&moved);
        }
    }

    fn initial_centroids(&self, k: usize) -> Vec<Vec<f64>> {
        match self.loss {
            KMeansLoss::SquaredEuclidean => {
                let points: Vec<&[f64]> = self.data.rows().collect();
                farthest_point_init(&points, k)
            }
            KMeansLoss::RegressionResidual => {
                // Preliminary clustering of ỹx = y·x, then one assignment pass
                // on ỹx and one regression fit per cluster.
                let reduced: Vec<Vec<f64>> = (0..self.n())
                    .map(|i| {
                        let y = self.response(i);
                        self.data.row(i).iter().map(|x| y * x).collect()
                    })
                    .collect();
                let points: Vec<&[f64]> = reduced.iter().map(Vec::as_slice).collect();
                let preliminary = farthest_point_init(&points, k);
                let mut labels: Vec<usize> = points
                    .iter()
                    .map(|p| {
                        let mut best = 0;
                        let mut best_loss = f64::INFINITY;
                        for (j, c) in preliminary.iter().enumerate() {
                            let l = squared_distance(p, c);
                            if l < best_loss {
                                best = j;
                                best_loss = l;
                            }
                        }
                        best
                    })
                    .collect();
                let mut centroids = vec![vec![0.0; self.data.d()]; k];
                self.estimate(&mut labels, &mut centroids);
                centroids
            }
        }
    }

    fn run(&self, k: usize, max_iter: usize, mut on_step: impl FnMut(f64)) -> Fit {
        let mut centroids = self.initial_centroids(k);
        let mut labels = self.assign(&centroids);
        on_step(self.total_loss(&labels, &centroids));
        let mut iterations = 0;
        let mut converged = false;
        while iterations < max_iter {
            iterations += 1;
            self.estimate(&mut labels, &mut centroids);
            on_step(self.total_loss(&labels, &centroids));
            let next = self.assign(&centroids);
            on_step(self.total_loss(&next, &centroids));
            if next == labels {
                converged = true;
                break;
            }
            labels = next;
        }
        let total_loss = self.total_loss(&labels, &centroids);
        Fit {
            labels,
            centroids,
            iterations,
            converged,
            total_loss,
        }
    }

    /// `(n/2) ln(Σρ / n) + K (d + 1) ln n`.
    fn bic(&self, fit: &Fit) -> f64 {
        let n = self.n() as f64;
        let k = fit.centroids.len() as f64;
        let d = self.data.d() as f64;
        0.5 * n * log(fit.total_loss / n) + k * (d + 1.0) * log(n)
    }
}

fn farthest_point_init(points: &[&[f64]], k: usize) -> Vec<Vec<f64>> {
    let d = points[0].len();
    let n = points.len() as f64;
    let mut mean = vec![0.0; d];
    for p in points {
        for (m, v) in mean.iter_mut().zip(p.iter()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= n);
    let mut centroids = vec![mean];
    let mut nearest: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p, &centroids[0]))
        .collect();
    while centroids.len() < k {
        let mut best = 0;
        for i in 1..points.len() {
            let ord = nearest[i]
                .total_cmp(&nearest[best])
                .then_with(|| lexicographic(points[best], points[i]));
            if ord.is_gt() {
                best = i;
            }
        }
        let chosen = points[best].to_vec();
        for (dist, p) in nearest.iter_mut().zip(points) {
            *dist = dist.min(squared_distance(p, &chosen));
        }
        centroids.push(chosen);
    }
    centroids
}

/// Minimum-norm least squares via SVD.
fn least_squares(x: &[f64], y: &[f64], d: usize) -> Vec<f64> {
    let m = y.len();
    let design = DMatrix::from_row_slice(m, d, x);
    let rhs = DVector::from_column_slice(y);
    let svd = design.svd(true, true);
    let largest = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = largest * 1e-12 * (m.max(d) as f64);
    match svd.solve(&rhs, eps) {
        Ok(theta) => theta.iter().copied().collect(),
        Err(_) => vec![0.0; d],
    }
}
