//! Alpha Procrustes distances between Gaussian measures on `ℝⁿ`:
//!
//! ```text
//! D²(N(m₁,C₁), N(m₂,C₂)) = d²_mean(m₁, m₂) + ¼ (d^α(C₁, C₂))²
//! ```
//!
//! `α = 1/2` with the Euclidean mean metric is the L²-Wasserstein distance.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{AlphaParam, SpdMatrix};
use crate::metrics::{alpha_procrustes, alpha_procrustes_regularized, bures_wasserstein};

/// `N(mean, covariance)` with a positive semi-definite covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMeasure {
    mean: DVector<f64>,
    covariance: SpdMatrix,
}

impl GaussianMeasure {
    pub fn new(mean: DVector<f64>, covariance: SpdMatrix) -> Result<Self> {
        if mean.len() != covariance.dim() {
            return Err(Error::DimensionError(format!(
                "mean of length {} with {}x{} covariance",
                mean.len(),
                covariance.dim(),
                covariance.dim()
            )));
        }
        if mean.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { mean, covariance })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &SpdMatrix {
        &self.covariance
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// A metric on mean vectors. Implement this to plug a custom `d_mean` into
/// the Gaussian distances.
pub trait MeanMetric {
    fn distance(&self, a: &DVector<f64>, b: &DVector<f64>) -> Result<f64>;
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum MeanMetricSpec {
    #[default]
    Euclidean,
    /// `sqrt(Σ w_i (a_i − b_i)²)` with strictly positive weights.
    WeightedEuclidean(Vec<f64>),
}

impl MeanMetricSpec {
    pub fn weighted(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidParameter(
                "mean-metric weights must be finite and strictly positive".into(),
            ));
        }
        Ok(Self::WeightedEuclidean(weights))
    }
}

impl MeanMetric for MeanMetricSpec {
    fn distance(&self, a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
        if a.len() != b.len() {
            return Err(Error::DimensionError(format!(
                "means of length {} and {}",
                a.len(),
                b.len()
            )));
        }
        match self {
            MeanMetricSpec::Euclidean => Ok((a - b).norm()),
            MeanMetricSpec::WeightedEuclidean(w) => {
                if w.len() != a.len() {
                    return Err(Error::DimensionError(format!(
                        "{} weights for means of length {}",
                        w.len(),
                        a.len()
                    )));
                }
                Ok(a.iter()
                    .zip(b.iter())
                    .zip(w)
                    .map(|((x, y), wi)| wi * (x - y).powi(2))
                    .sum::<f64>()
                    .sqrt())
            }
        }
    }
}

fn check_pair(g1: &GaussianMeasure, g2: &GaussianMeasure) -> Result<()> {
    if g1.dim() == g2.dim() {
        Ok(())
    } else {
        Err(Error::DimensionError(format!(
            "Gaussians on R^{} and R^{}",
            g1.dim(),
            g2.dim()
        )))
    }
}

fn combine(mean_dist: f64, cov_dist: f64) -> f64 {
    (mean_dist * mean_dist + 0.25 * cov_dist * cov_dist).sqrt()
}

/// `sqrt(d²_mean + ¼ d^α(C₁, C₂)²)`; covariances must be strictly positive
/// definite when `α ≤ 0`.
pub fn gaussian_alpha_distance(
    g1: &GaussianMeasure,
    g2: &GaussianMeasure,
    alpha: AlphaParam,
    mean_metric: &dyn MeanMetric,
) -> Result<f64> {
    check_pair(g1, g2)?;
    let dm = mean_metric.distance(&g1.mean, &g2.mean)?;
    let dc = alpha_procrustes(&g1.covariance, &g2.covariance, alpha)?.value;
    Ok(combine(dm, dc))
}

/// L²-Wasserstein distance `sqrt(‖m₁ − m₂‖² + d_BW(C₁, C₂)²)`.
pub fn wasserstein_gaussian(g1: &GaussianMeasure, g2: &GaussianMeasure) -> Result<f64> {
    check_pair(g1, g2)?;
    let dm = (&g1.mean - &g2.mean).norm();
    let bw = bures_wasserstein(&g1.covariance, &g2.covariance)?.value;
    Ok((dm * dm + bw * bw).sqrt())
}

/// Distance with covariances regularized to `C + γI`, `γ > 0`.
pub fn gaussian_alpha_distance_regularized(
    g1: &GaussianMeasure,
    g2: &GaussianMeasure,
    alpha: AlphaParam,
    gamma: f64,
    mean_metric: &dyn MeanMetric,
) -> Result<f64> {
    check_pair(g1, g2)?;
    let dm = mean_metric.distance(&g1.mean, &g2.mean)?;
    let dc = alpha_procrustes_regularized(&g1.covariance, &g2.covariance, gamma, alpha)?.value;
    Ok(combine(dm, dc))
}
