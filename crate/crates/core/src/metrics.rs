//! The Alpha Procrustes distance family on SPD/PSD matrices.
//!
//! For `α ≠ 0`,
//!
//! ```text
//! d^α(A, B) = (1/|α|) · min_{U orthogonal} ‖A^α − B^α U‖_F
//!           = (1/|α|) · sqrt(tr[A^{2α} + B^{2α} − 2 (A^α B^{2α} A^α)^{1/2}])
//! ```
//!
//! and `d^0(A, B) = ‖log A − log B‖_F` (Log-Euclidean). `α = 1/2` gives twice
//! the Bures-Wasserstein distance; for commuting pairs the family reduces to
//! the power-Euclidean distance `‖A^α − B^α‖_F / |α|`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    frobenius, psd_sqrt, spd_log, spd_power, sym_eigendecompose, trace_sqrt_triple, AlphaMode,
    AlphaParam, SpdMatrix, SymMatrix,
};

/// Relative size of a negative trace argument still attributed to roundoff.
pub const TRACE_CLAMP_TOL: f64 = 1e-9;
/// `‖AB − BA‖_F` below this (relative to `‖A‖‖B‖`) marks a pair as commuting.
pub const COMMUTING_TOL: f64 = 1e-12;

/// Which closed form produced a [`DistanceResult`]. Diagnostic only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulaPath {
    General,
    LogLimit,
    Commuting,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceResult {
    pub value: f64,
    pub alpha: AlphaParam,
    /// Regularization shift; zero when unregularized.
    pub gamma: f64,
    pub formula_path: FormulaPath,
}

fn check_dims(a: &SpdMatrix, b: &SpdMatrix) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(Error::DimensionError(format!(
            "{}x{} vs {}x{}",
            a.dim(),
            a.dim(),
            b.dim(),
            b.dim()
        )))
    }
}

pub fn commute(a: &SpdMatrix, b: &SpdMatrix) -> bool {
    let (ma, mb) = (a.as_matrix(), b.as_matrix());
    let comm = ma * mb - mb * ma;
    frobenius(&comm) < COMMUTING_TOL * frobenius(ma) * frobenius(mb)
}

/// Clamps a trace expression that should be nonnegative; `scale` is the sum of
/// the positive terms that produced it.
pub(crate) fn clamp_trace(value: f64, scale: f64) -> Result<f64> {
    if value >= 0.0 {
        return Ok(value);
    }
    let threshold = TRACE_CLAMP_TOL * scale.abs().max(f64::MIN_POSITIVE);
    if -value < threshold {
        Ok(0.0)
    } else {
        Err(Error::NumericalInconsistency { value, threshold })
    }
}

/// `‖log A − log B‖_F`; both inputs strictly positive definite.
fn log_difference_norm(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    let la = spd_log(a)?;
    let lb = spd_log(b)?;
    Ok(frobenius(&(la.into_matrix() - lb.into_matrix())))
}

/// Squared trace expression `tr[A^{2α} + B^{2α} − 2 (A^α B^{2α} A^α)^{1/2}]`,
/// clamped at zero.
fn family_trace(a: &SpdMatrix, b: &SpdMatrix, alpha: f64) -> Result<f64> {
    if alpha < 0.0 {
        a.require_strict()?;
        b.require_strict()?;
    }
    let tr_a: f64 = a
        .eig()
        .eigenvalues()
        .iter()
        .map(|l| l.powf(2.0 * alpha))
        .sum();
    let tr_b: f64 = b
        .eig()
        .eigenvalues()
        .iter()
        .map(|l| l.powf(2.0 * alpha))
        .sum();
    if alpha.abs() < SMALL_ALPHA {
        return clamp_trace(small_alpha_trace(a, b, alpha)?, tr_a + tr_b);
    }
    let cross = trace_sqrt_triple(a, b, alpha)?;
    clamp_trace(tr_a + tr_b - 2.0 * cross, tr_a + tr_b)
}

/// Below this `|α|` the trace is assembled from `A^{2α} − I`, `B^{2α} − I`
/// directly instead of from `O(n)` terms that cancel to `O(α²)`.
const SMALL_ALPHA: f64 = 0.1;

/// With `X = A^α`, `Y = B^α`: the singular values of `XY` are `sqrt(1 + μ)`
/// for `μ` the eigenvalues of `Y (X² − I) Y + (Y² − I)`, so
/// `tr X² + tr Y² − 2‖XY‖_* = tr(X² − I) + tr(Y² − I) − 2 Σ (sqrt(1 + μ) − 1)`.
fn small_alpha_trace(a: &SpdMatrix, b: &SpdMatrix, alpha: f64) -> Result<f64> {
    // ln 0 = −∞ gives expm1 = −1, the right value for PSD inputs with α > 0
    let pow_m1 = |e: &SpdMatrix, p: f64| e.eig().map(|l| (p * l.ln()).exp_m1());
    let qa = pow_m1(a, 2.0 * alpha);
    let qb = pow_m1(b, 2.0 * alpha);
    let y = spd_power(b, alpha)?;
    let s = SymMatrix::new(y.as_matrix() * &qa * y.as_matrix() + &qb)?;
    let excess: f64 = sym_eigendecompose(&s)?
        .eigenvalues()
        .iter()
        .map(|&mu| {
            let mu = mu.max(-1.0);
            mu / (1.0 + (1.0 + mu).sqrt())
        })
        .sum();
    Ok(qa.trace() + qb.trace() - 2.0 * excess)
}

pub fn alpha_procrustes(a: &SpdMatrix, b: &SpdMatrix, alpha: AlphaParam) -> Result<DistanceResult> {
    check_dims(a, b)?;
    let (a, b) = canonical_order(a, b);
    let (value, formula_path) = match alpha.mode() {
        AlphaMode::LogLimit => (log_difference_norm(a, b)?, FormulaPath::LogLimit),
        AlphaMode::General => {
            let al = alpha.value();
            let value = family_trace(a, b, al)?.sqrt() / al.abs();
            let path = if commute(a, b) {
                FormulaPath::Commuting
            } else {
                FormulaPath::General
            };
            (value, path)
        }
    };
    Ok(DistanceResult {
        value,
        alpha,
        gamma: 0.0,
        formula_path,
    })
}

/// Orders the pair by entries so that swapping the arguments runs the same
/// floating-point computation, making the distances exactly symmetric.
fn canonical_order<'a>(a: &'a SpdMatrix, b: &'a SpdMatrix) -> (&'a SpdMatrix, &'a SpdMatrix) {
    let ord = a
        .as_matrix()
        .iter()
        .zip(b.as_matrix().iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne());
    match ord {
        Some(std::cmp::Ordering::Greater) => (b, a),
        _ => (a, b),
    }
}

/// `sqrt(tr[A + B − 2 (A^{1/2} B A^{1/2})^{1/2}])`.
pub fn bures_wasserstein(a: &SpdMatrix, b: &SpdMatrix) -> Result<DistanceResult> {
    check_dims(a, b)?;
    let (a, b) = canonical_order(a, b);
    let ra = psd_sqrt(a);
    let inner = ra.as_matrix() * b.as_matrix() * ra.as_matrix();
    let eig = sym_eigendecompose(&SymMatrix::new(inner)?)?;
    let cross: f64 = eig.eigenvalues().iter().map(|l| l.max(0.0).sqrt()).sum();
    let scale = a.trace() + b.trace();
    let value = clamp_trace(scale - 2.0 * cross, scale)?.sqrt();
    Ok(DistanceResult {
        value,
        alpha: AlphaParam::new(0.5)?,
        gamma: 0.0,
        formula_path: if commute(a, b) {
            FormulaPath::Commuting
        } else {
            FormulaPath::General
        },
    })
}

pub fn log_euclidean(a: &SpdMatrix, b: &SpdMatrix) -> Result<DistanceResult> {
    check_dims(a, b)?;
    Ok(DistanceResult {
        value: log_difference_norm(a, b)?,
        alpha: AlphaParam::log_limit(),
        gamma: 0.0,
        formula_path: FormulaPath::LogLimit,
    })
}

/// `‖A^α − B^α‖_F / |α|` for `α ≠ 0`.
pub fn power_euclidean(a: &SpdMatrix, b: &SpdMatrix, alpha: f64) -> Result<DistanceResult> {
    check_dims(a, b)?;
    let param = AlphaParam::new(alpha)?;
    if param.is_log_limit() {
        return Err(Error::InvalidParameter(format!(
            "power-Euclidean distance needs alpha != 0, got {alpha}"
        )));
    }
    let pa = spd_power(a, alpha)?;
    let pb = spd_power(b, alpha)?;
    Ok(DistanceResult {
        value: frobenius(&(pa.as_matrix() - pb.as_matrix())) / alpha.abs(),
        alpha: param,
        gamma: 0.0,
        formula_path: if commute(a, b) {
            FormulaPath::Commuting
        } else {
            FormulaPath::General
        },
    })
}

/// Alpha Procrustes distance between `A + γI` and `B + γI`, `γ > 0`.
pub fn alpha_procrustes_regularized(
    a: &SpdMatrix,
    b: &SpdMatrix,
    gamma: f64,
    alpha: AlphaParam,
) -> Result<DistanceResult> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "regularization gamma must be positive, got {gamma}"
        )));
    }
    check_dims(a, b)?;
    let ag = a.shifted(gamma)?;
    let bg = b.shifted(gamma)?;
    let mut r = alpha_procrustes(&ag, &bg, alpha)?;
    r.gamma = gamma;
    Ok(r)
}

/// Directly minimizes `‖A^α − B^α U‖_F / |α|` over the orthogonal group O(2).
///
/// Both components (rotations and reflections) are scanned on a uniform angle
/// grid, then the best cell is refined by golden-section search to `1e-10`
/// in the angle. Only meant as a test oracle.
pub fn procrustes_bruteforce_2x2(
    a: &SpdMatrix,
    b: &SpdMatrix,
    alpha: f64,
    grid_size: usize,
) -> Result<f64> {
    if a.dim() != 2 || b.dim() != 2 {
        return Err(Error::DimensionError(format!(
            "brute-force oracle needs 2x2 inputs, got {}x{} and {}x{}",
            a.dim(),
            a.dim(),
            b.dim(),
            b.dim()
        )));
    }
    if grid_size < 360 {
        return Err(Error::InvalidParameter(format!(
            "grid_size must be at least 360, got {grid_size}"
        )));
    }
    if !alpha.is_finite() || alpha == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha must be finite and nonzero, got {alpha}"
        )));
    }
    let pa = spd_power(a, alpha)?.as_matrix().clone();
    let pb = spd_power(b, alpha)?.as_matrix().clone();

    let objective = |theta: f64, reflect: bool| {
        let (s, c) = theta.sin_cos();
        let sign = if reflect { -1.0 } else { 1.0 };
        // rotation(θ) · diag(1, sign)
        let u = DMatrix::from_row_slice(2, 2, &[c, -s * sign, s, c * sign]);
        frobenius(&(&pa - &pb * u))
    };

    let step = std::f64::consts::TAU / grid_size as f64;
    let mut best = f64::INFINITY;
    for reflect in [false, true] {
        let (k_best, _) = (0..grid_size)
            .map(|k| (k, objective(k as f64 * step, reflect)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("grid is nonempty");
        let center = k_best as f64 * step;
        let refined = golden_section(
            |t| objective(t, reflect),
            center - step,
            center + step,
            1e-10,
        );
        best = best.min(refined);
    }
    Ok(best / alpha.abs())
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2).min(f(0.5 * (lo + hi)))
}

/// Symmetric matrix of pairwise Alpha Procrustes distances, computed in parallel.
pub fn pairwise_alpha_procrustes(mats: &[SpdMatrix], alpha: AlphaParam) -> Result<DMatrix<f64>> {
    let n = mats.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| alpha_procrustes(&mats[i], &mats[j], alpha).map(|r| r.value))
        .collect::<Result<Vec<f64>>>()?;
    let mut out = DMatrix::zeros(n, n);
    for (&(i, j), v) in pairs.iter().zip(values) {
        out[(i, j)] = v;
        out[(j, i)] = v;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::E;

    fn alpha(v: f64) -> AlphaParam {
        AlphaParam::new(v).unwrap()
    }

    fn commuting_pair() -> (SpdMatrix, SpdMatrix) {
        (
            SpdMatrix::from_diagonal(&[1.0, 4.0]).unwrap(),
            SpdMatrix::from_diagonal(&[9.0, 16.0]).unwrap(),
        )
    }

    #[test]
    fn self_distance_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = sample::random_spd(&mut rng, 4);
        for al in [-1.0, 0.3, 0.5, 2.0] {
            assert!(alpha_procrustes(&a, &a, alpha(al)).unwrap().value < 1e-6);
        }
        assert_eq!(
            alpha_procrustes(&a, &a, AlphaParam::log_limit())
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn commuting_example() {
        let (a, b) = commuting_pair();
        let r = alpha_procrustes(&a, &b, alpha(0.5)).unwrap();
        assert_relative_eq!(r.value, 4.0 * 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(r.formula_path, FormulaPath::Commuting);
        let bw = bures_wasserstein(&a, &b).unwrap();
        assert_relative_eq!(bw.value, 2.0 * 2f64.sqrt(), epsilon = 1e-12);
        let pe = power_euclidean(&a, &b, 0.5).unwrap();
        assert_relative_eq!(pe.value, 4.0 * 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn bures_self_and_half_coincidence() {
        let i = SpdMatrix::identity(3);
        assert_eq!(bures_wasserstein(&i, &i).unwrap().value, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..7 {
            let a = sample::random_spd(&mut rng, n);
            let b = sample::random_spd(&mut rng, n);
            let d = alpha_procrustes(&a, &b, alpha(0.5)).unwrap().value;
            let bw = bures_wasserstein(&a, &b).unwrap().value;
            assert_relative_eq!(d, 2.0 * bw, max_relative = 1e-10);
        }
    }

    #[test]
    fn log_euclidean_examples() {
        let a = SpdMatrix::from_diagonal(&[E, E * E]).unwrap();
        let i = SpdMatrix::identity(2);
        assert_relative_eq!(
            log_euclidean(&a, &i).unwrap().value,
            5f64.sqrt(),
            epsilon = 1e-14
        );
        assert_eq!(log_euclidean(&a, &a).unwrap().value, 0.0);
    }

    #[test]
    fn log_limit_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = sample::random_spd(&mut rng, 4);
        let b = sample::random_spd(&mut rng, 4);
        let le = log_euclidean(&a, &b).unwrap().value;
        let g3 = (alpha_procrustes(&a, &b, alpha(1e-3)).unwrap().value - le).abs();
        let g4 = (alpha_procrustes(&a, &b, alpha(1e-4)).unwrap().value - le).abs();
        assert!(g3 < 1e-2 * le);
        // roughly linear: a tenfold smaller alpha gives a several-fold smaller gap
        assert!(g4 < 0.3 * g3, "g3={g3:e} g4={g4:e}");
    }

    #[test]
    fn log_limit_rejects_singular() {
        let a = SpdMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let b = SpdMatrix::identity(2);
        assert!(matches!(
            alpha_procrustes(&a, &b, AlphaParam::log_limit()),
            Err(Error::SingularBase { .. })
        ));
        assert!(matches!(
            alpha_procrustes(&a, &b, alpha(-0.5)),
            Err(Error::SingularBase { .. })
        ));
        assert!(alpha_procrustes(&a, &b, alpha(0.5)).is_ok());
    }

    #[test]
    fn power_euclidean_dominates() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for n in 2..6 {
            let (a, b) = sample::random_noncommuting_pair(&mut rng, n, 0.05);
            for al in [-1.0, 0.5, 0.7, 2.0] {
                let d = alpha_procrustes(&a, &b, alpha(al)).unwrap().value;
                let pe = power_euclidean(&a, &b, al).unwrap().value;
                assert!(pe - d > 1e-6, "alpha={al}: pe={pe} d={d}");
            }
        }
        assert!(power_euclidean(&SpdMatrix::identity(2), &SpdMatrix::identity(2), 0.0).is_err());
    }

    #[test]
    fn regularized_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let a = sample::random_psd_rank(&mut rng, 4, 2);
        let b = sample::random_psd_rank(&mut rng, 4, 3);
        assert!(
            alpha_procrustes_regularized(&a, &a, 0.1, alpha(0.7))
                .unwrap()
                .value
                < 1e-6
        );

        // γ^α scaling identity
        for (gamma, al) in [(0.3, 0.7), (2.0, -0.5), (0.05, 1.0)] {
            let lhs = alpha_procrustes_regularized(&a, &b, gamma, alpha(al))
                .unwrap()
                .value;
            let a1 = a.scaled(1.0 / gamma).unwrap();
            let b1 = b.scaled(1.0 / gamma).unwrap();
            let rhs = gamma.powf(al)
                * alpha_procrustes_regularized(&a1, &b1, 1.0, alpha(al))
                    .unwrap()
                    .value;
            assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
        }

        assert!(alpha_procrustes_regularized(&a, &b, 0.0, alpha(0.5)).is_err());
    }

    #[test]
    fn regularized_converges_as_gamma_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let a = sample::random_psd_rank(&mut rng, 4, 2);
        let b = sample::random_psd_rank(&mut rng, 4, 3);
        let exact = alpha_procrustes(&a, &b, alpha(0.5)).unwrap().value;
        let mut prev = f64::INFINITY;
        for k in 2..=7 {
            let gamma = 10f64.powi(-k);
            let r = alpha_procrustes_regularized(&a, &b, gamma, alpha(0.5))
                .unwrap()
                .value;
            let gap = (r - exact).abs() / exact;
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn regularized_log_limit_is_log_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let a = sample::random_psd_rank(&mut rng, 3, 1);
        let b = sample::random_spd(&mut rng, 3);
        let r = alpha_procrustes_regularized(&a, &b, 0.25, AlphaParam::log_limit()).unwrap();
        let le = log_euclidean(&a.shifted(0.25).unwrap(), &b.shifted(0.25).unwrap()).unwrap();
        assert_relative_eq!(r.value, le.value, max_relative = 1e-14);
        assert_eq!(r.gamma, 0.25);
    }

    #[test]
    fn bruteforce_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let a = sample::random_spd(&mut rng, 2);
        assert!(procrustes_bruteforce_2x2(&a, &a, 0.7, 720).unwrap() < 1e-6);
        let (c1, c2) = commuting_pair();
        let bf = procrustes_bruteforce_2x2(&c1, &c2, 0.5, 720).unwrap();
        assert_relative_eq!(
            bf,
            power_euclidean(&c1, &c2, 0.5).unwrap().value,
            epsilon = 1e-9
        );
        for _ in 0..5 {
            let a = sample::random_spd(&mut rng, 2);
            let b = sample::random_spd(&mut rng, 2);
            let bf = procrustes_bruteforce_2x2(&a, &b, 0.5, 720).unwrap();
            let bw = bures_wasserstein(&a, &b).unwrap().value;
            assert!((bf - 2.0 * bw).abs() < 1e-6);
            let bf7 = procrustes_bruteforce_2x2(&a, &b, 0.7, 720).unwrap();
            let cf = alpha_procrustes(&a, &b, alpha(0.7)).unwrap().value;
            assert!((bf7 - cf).abs() < 1e-6);
        }
    }

    #[test]
    fn bruteforce_rejects_bad_input() {
        let a3 = SpdMatrix::identity(3);
        assert!(matches!(
            procrustes_bruteforce_2x2(&a3, &a3, 0.5, 720),
            Err(Error::DimensionError(_))
        ));
        let a2 = SpdMatrix::identity(2);
        assert!(procrustes_bruteforce_2x2(&a2, &a2, 0.5, 100).is_err());
    }

    #[test]
    fn pairwise_matches_single_calls() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let mats: Vec<SpdMatrix> = (0..5).map(|_| sample::random_spd(&mut rng, 3)).collect();
        let d = pairwise_alpha_procrustes(&mats, alpha(0.7)).unwrap();
        assert_eq!(
            d[(1, 3)],
            alpha_procrustes(&mats[1], &mats[3], alpha(0.7))
                .unwrap()
                .value
        );
        assert_eq!(d[(3, 1)], d[(1, 3)]);
        assert_eq!(d[(2, 2)], 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let r = alpha_procrustes(&SpdMatrix::identity(2), &SpdMatrix::identity(3), alpha(0.5));
        assert!(matches!(r, Err(Error::DimensionError(_))));
    }
}
