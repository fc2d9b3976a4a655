//! Alpha Procrustes distances on symmetric positive definite matrices.
//!
//! The family `d^α` interpolates between the Bures-Wasserstein distance
//! (`α = 1/2`, up to a factor 2), the Log-Euclidean distance (`α → 0`) and
//! the power-Euclidean distances (commuting pairs). This crate implements the
//! family on matrices, the Riemannian metric and geodesics it comes from,
//! distances between Gaussian measures, and closed-form distances between RKHS
//! covariance operators computed from kernel Gram matrices.
//!
//! ```
//! use procrustes_core::{alpha_procrustes, bures_wasserstein, AlphaParam, SpdMatrix};
//!
//! let a = SpdMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
//! let b = SpdMatrix::from_diagonal(&[9.0, 16.0]).unwrap();
//! let d = alpha_procrustes(&a, &b, AlphaParam::new(0.5).unwrap()).unwrap();
//! let bw = bures_wasserstein(&a, &b).unwrap();
//! assert!((d.value - 2.0 * bw.value).abs() < 1e-12);
//! ```

pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod metrics;
pub mod riemann;
pub mod rkhs;
pub mod sample;
pub mod validate;

pub use error::{Error, Result};
pub use gaussian::{
    gaussian_alpha_distance, gaussian_alpha_distance_regularized, wasserstein_gaussian,
    GaussianMeasure, MeanMetric, MeanMetricSpec,
};
pub use linalg::{
    h_alpha, loewner_apply, nuclear_norm, psd_sqrt, spd_log, spd_power, sym_eigendecompose,
    sym_exp, trace_sqrt_triple, AlphaMode, AlphaParam, EigenDecomposition, ScalarFn, SpdMatrix,
    SymMatrix,
};
pub use metrics::{
    alpha_procrustes, alpha_procrustes_regularized, bures_wasserstein, log_euclidean,
    power_euclidean, procrustes_bruteforce_2x2, DistanceResult, FormulaPath,
};
pub use riemann::{
    geodesic_eval, geodesic_length_numeric, metric_inner, solve_general_lyapunov, GeodesicCurve,
    TangentVector,
};
pub use rkhs::{
    covariance_distance_projected, explicit_feature_covariance, gram_bundle,
    mean_discrepancy_squared, rkhs_alpha_distance, rkhs_alpha_distance_unregularized,
    rkhs_gaussian_distance, rkhs_wasserstein, CenteredGram, Dataset, GramBundle, KernelSpec,
    RkhsDistance,
};
pub use validate::{run_validation, SuiteOutcome, Tolerances, ValidationConfig, ValidationReport};
