use thiserror::Error;

/// Errors raised by the distance and geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input contains NaN or infinite entries")]
    NonFinite,

    #[error("eigensolver failed to converge on a {dim}x{dim} matrix")]
    ConvergenceFailure { dim: usize },

    #[error("matrix is singular or nearly so (min eigenvalue {min_eig:e} <= tolerance {tol:e})")]
    SingularBase { min_eig: f64, tol: f64 },

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eig:e} < -{tol:e})")]
    NotPositiveSemidefinite { min_eig: f64, tol: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionError(String),

    #[error("function outside its domain: {0}")]
    DomainError(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative trace argument {value:e} exceeds roundoff threshold {threshold:e}")]
    NumericalInconsistency { value: f64, threshold: f64 },

    #[error("geodesic bracket lost positive definiteness (min eigenvalue {min_eig:e})")]
    NonSpdIntermediate { min_eig: f64 },

    #[error("spectrum has an eigenvalue with imaginary part {imag:e} above tolerance {tol:e}")]
    ComplexSpectrum { imag: f64, tol: f64 },

    #[error("kernel {0} has no finite feature map")]
    UnsupportedKernel(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
