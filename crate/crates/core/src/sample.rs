//! Random test inputs: SPD matrices, orthogonal matrices, datasets.
//!
//! Used by the randomized validation suites, the test suites and the benches.
//! Generators are deterministic given the RNG state.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::gaussian::GaussianMeasure;
use crate::linalg::{SpdMatrix, SymMatrix};
use crate::rkhs::Dataset;

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn random_sym<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SymMatrix {
    SymMatrix::new(gaussian_matrix(rng, n, n)).expect("finite square matrix")
}

/// Random orthogonal matrix (Q factor of a Gaussian matrix, sign-fixed).
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Well-conditioned SPD matrix: `Q diag(λ) Qᵀ` with `λ` uniform in `[0.2, 3]`.
pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SpdMatrix {
    let spectrum: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..3.0)).collect();
    spd_with_spectrum(rng, &spectrum)
}

/// SPD matrix whose eigenvalues are at least 0.5 apart, in a random basis.
/// Two such matrices are far from commuting with high probability.
pub fn random_spd_separated<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SpdMatrix {
    let spectrum: Vec<f64> = (0..n)
        .map(|i| 0.3 + 0.8 * i as f64 + rng.random_range(0.0..0.3))
        .collect();
    spd_with_spectrum(rng, &spectrum)
}

pub fn spd_with_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[f64]) -> SpdMatrix {
    let n = spectrum.len();
    let q = random_orthogonal(rng, n);
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(spectrum));
    SpdMatrix::from_matrix(&q * d * q.transpose()).expect("PSD by construction")
}

/// PSD matrix of exact rank `rank` (zero eigenvalues clamped).
pub fn random_psd_rank<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> SpdMatrix {
    let spectrum: Vec<f64> = (0..n)
        .map(|i| {
            if i < rank {
                rng.random_range(0.2..3.0)
            } else {
                0.0
            }
        })
        .collect();
    spd_with_spectrum(rng, &spectrum)
}

/// Two diagonal-in-the-same-basis SPD matrices.
pub fn random_commuting_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (SpdMatrix, SpdMatrix) {
    let q = random_orthogonal(rng, n);
    let make = |rng: &mut R| {
        let d = DVector::from_fn(n, |_, _| rng.random_range(0.2..3.0));
        SpdMatrix::from_matrix(&q * DMatrix::from_diagonal(&d) * q.transpose())
            .expect("PSD by construction")
    };
    let a = make(rng);
    let b = make(rng);
    (a, b)
}

/// `‖AB − BA‖_F / (‖A‖_F ‖B‖_F)`.
pub fn relative_commutator(a: &SpdMatrix, b: &SpdMatrix) -> f64 {
    let (x, y) = (a.as_matrix(), b.as_matrix());
    (x * y - y * x).norm() / (x.norm() * y.norm())
}

/// Separated-spectrum pair, redrawn until the relative commutator is at
/// least `min_commutator`.
pub fn random_noncommuting_pair<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    min_commutator: f64,
) -> (SpdMatrix, SpdMatrix) {
    loop {
        let a = random_spd_separated(rng, n);
        let b = random_spd_separated(rng, n);
        if relative_commutator(&a, &b) >= min_commutator {
            return (a, b);
        }
    }
}

pub fn random_gaussian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> GaussianMeasure {
    let mean = DVector::from_fn(n, |_, _| rng.sample(StandardNormal));
    GaussianMeasure::new(mean, random_spd(rng, n)).expect("matching dimensions")
}

/// `m` points in `dim` dimensions, Gaussian with the given location shift.
pub fn random_dataset<R: Rng + ?Sized>(rng: &mut R, m: usize, dim: usize, shift: f64) -> Dataset {
    let pts = gaussian_matrix(rng, m, dim).map(|x| x + shift);
    Dataset::new(pts).expect("at least two finite points")
}
