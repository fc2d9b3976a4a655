//! Alpha Procrustes distances between RKHS covariance operators and between
//! the induced Gaussian measures, computed entirely from kernel Gram matrices.
//!
//! With `A = Φ(X) J_m / √m` and `B = Φ(Y) J_n / √n`, the covariance operators
//! are `C_X = A A*`, `C_Y = B B*`, and every quantity reduces to the centered
//! blocks
//!
//! ```text
//! A*A = J_m K[X] J_m / m,   B*B = J_n K[Y] J_n / n,   A*B = J_m K[X,Y] J_n / √(mn).
//! ```

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, RowDVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    h_alpha, nuclear_norm, real_spectrum, spd_power, sym_eigendecompose, AlphaParam, SpdMatrix,
    SymMatrix, RANK_TOL,
};
use crate::metrics::{alpha_procrustes_regularized, clamp_trace};

/// Largest explicit feature dimension [`explicit_features`] will build.
pub const MAX_FEATURE_DIM: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `⟨x, y⟩`
    Linear,
    /// `(⟨x, y⟩ + offset)^degree`
    Polynomial { degree: u32, offset: f64 },
    /// `exp(−‖x − y‖² / (2σ²))`
    GaussianRbf { sigma: f64 },
}

impl KernelSpec {
    pub fn polynomial(degree: u32, offset: f64) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidParameter(
                "polynomial degree must be >= 1".into(),
            ));
        }
        if !(offset.is_finite() && offset >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "polynomial offset must be finite and >= 0, got {offset}"
            )));
        }
        Ok(Self::Polynomial { degree, offset })
    }

    pub fn gaussian_rbf(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rbf bandwidth must be finite and > 0, got {sigma}"
            )));
        }
        Ok(Self::GaussianRbf { sigma })
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(x, y),
            KernelSpec::Polynomial { degree, offset } => (dot(x, y) + offset).powi(degree as i32),
            KernelSpec::GaussianRbf { sigma } => {
                let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-sq / (2.0 * sigma * sigma)).exp()
            }
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => f.write_str("linear"),
            KernelSpec::Polynomial { degree, offset } => write!(f, "poly:d={degree},c={offset}"),
            KernelSpec::GaussianRbf { sigma } => write!(f, "rbf:sigma={sigma}"),
        }
    }
}

/// Parses `linear`, `poly:d=2,c=1` and `rbf:sigma=0.5`. Polynomial parameters
/// default to `d=2`, `c=0`.
impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), p.trim()),
            None => (s, ""),
        };
        let mut kv = Vec::new();
        for part in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| {
                Error::Parse(format!("kernel parameter '{part}' is not key=value"))
            })?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("kernel parameter '{part}' is not numeric")))?;
            kv.push((k.trim().to_ascii_lowercase(), v));
        }
        let unknown = |allowed: &[&str]| {
            kv.iter()
                .find(|(k, _)| !allowed.contains(&k.as_str()))
                .map(|(k, _)| Error::Parse(format!("unknown kernel parameter '{k}' for {name}")))
        };
        let get = |key: &str| kv.iter().find(|(k, _)| k == key).map(|(_, v)| *v);
        match name.to_ascii_lowercase().as_str() {
            "linear" => match unknown(&[]) {
                Some(e) => Err(e),
                None => Ok(KernelSpec::Linear),
            },
            "poly" | "polynomial" => {
                if let Some(e) = unknown(&["d", "c"]) {
                    return Err(e);
                }
                let d = get("d").unwrap_or(2.0);
                if d.fract() != 0.0 || d < 1.0 || d > u32::MAX as f64 {
                    return Err(Error::Parse(format!(
                        "polynomial degree must be a positive integer, got {d}"
                    )));
                }
                KernelSpec::polynomial(d as u32, get("c").unwrap_or(0.0))
            }
            "rbf" | "gaussian" => {
                if let Some(e) = unknown(&["sigma"]) {
                    return Err(e);
                }
                let sigma = get("sigma")
                    .ok_or_else(|| Error::Parse("rbf kernel needs sigma=<value>".into()))?;
                KernelSpec::gaussian_rbf(sigma)
            }
            other => Err(Error::Parse(format!("unknown kernel '{other}'"))),
        }
    }
}

/// Sample matrix, one point per row, at least two points.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: DMatrix<f64>,
}

impl Dataset {
    pub fn new(points: DMatrix<f64>) -> Result<Self> {
        if points.nrows() < 2 {
            return Err(Error::DimensionError(format!(
                "a dataset needs at least two points, got {}",
                points.nrows()
            )));
        }
        if points.ncols() == 0 {
            return Err(Error::DimensionError("points have zero dimension".into()));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.points
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

/// The Gram matrices `K[X]`, `K[Y]` and `K[X,Y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramBundle {
    pub kxx: DMatrix<f64>,
    pub kyy: DMatrix<f64>,
    pub kxy: DMatrix<f64>,
}

fn cross_gram(k: &KernelSpec, xs: &[Vec<f64>], ys: &[Vec<f64>]) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|x| ys.iter().map(|y| k.eval(x, y)).collect())
        .collect();
    DMatrix::from_fn(xs.len(), ys.len(), |i, j| rows[i][j])
}

pub fn gram_bundle(x: &Dataset, y: &Dataset, k: &KernelSpec) -> Result<GramBundle> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionError(format!(
            "datasets in R^{} and R^{}",
            x.dim(),
            y.dim()
        )));
    }
    let xs = x.rows();
    let ys = y.rows();
    let kxx = crate::linalg::symmetrize(&cross_gram(k, &xs, &xs));
    let kyy = crate::linalg::symmetrize(&cross_gram(k, &ys, &ys));
    let kxy = cross_gram(k, &xs, &ys);
    Ok(GramBundle { kxx, kyy, kxy })
}

/// `J_m = I − (1/m) 1 1ᵀ`.
pub fn centering(m: usize) -> DMatrix<f64> {
    DMatrix::identity(m, m) - DMatrix::from_element(m, m, 1.0 / m as f64)
}

/// Centered, scaled Gram blocks `A*A`, `B*B`, `A*B`.
#[derive(Debug, Clone)]
pub struct CenteredGram {
    pub aa: SpdMatrix,
    pub bb: SpdMatrix,
    pub ab: DMatrix<f64>,
}

impl CenteredGram {
    pub fn from_bundle(gb: &GramBundle) -> Result<Self> {
        let m = gb.kxx.nrows();
        let n = gb.kyy.nrows();
        let (jm, jn) = (centering(m), centering(n));
        let aa = SpdMatrix::from_matrix(&jm * &gb.kxx * &jm / m as f64)?;
        let bb = SpdMatrix::from_matrix(&jn * &gb.kyy * &jn / n as f64)?;
        let ab = &jm * &gb.kxy * &jn / ((m * n) as f64).sqrt();
        Ok(Self { aa, bb, ab })
    }

    pub fn m(&self) -> usize {
        self.aa.dim()
    }

    pub fn n(&self) -> usize {
        self.bb.dim()
    }
}

/// `‖μ_Φ(X) − μ_Φ(Y)‖²`, valid for differing sample counts; clamped at zero.
pub fn mean_discrepancy_squared(gb: &GramBundle) -> f64 {
    let m = gb.kxx.nrows() as f64;
    let n = gb.kyy.nrows() as f64;
    let v = gb.kxx.sum() / (m * m) + gb.kyy.sum() / (n * n) - 2.0 * gb.kxy.sum() / (m * n);
    v.max(0.0)
}

/// `(1+λ)^p − 1` without cancellation for small `λ`.
fn pow1p_m1(lambda: f64, p: f64) -> f64 {
    (p * lambda.ln_1p()).exp_m1()
}

/// Regularized covariance-operator distance from centered Gram blocks
/// (`m == n`), via the 3m×3m block matrix.
pub fn covariance_distance_regularized(cg: &CenteredGram, alpha: f64, gamma: f64) -> Result<f64> {
    if cg.m() != cg.n() {
        return Err(Error::DimensionError(format!(
            "regularized RKHS distance needs equal sample counts, got {} and {}",
            cg.m(),
            cg.n()
        )));
    }
    if !alpha.is_finite() || AlphaParam::new(alpha)?.is_log_limit() {
        return Err(Error::InvalidParameter(format!(
            "RKHS operator distance needs alpha != 0, got {alpha}"
        )));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "regularization gamma must be positive, got {gamma}"
        )));
    }
    let m = cg.m();
    let p = 2.0 * alpha;
    let g2a = gamma.powf(p);

    // tr[(E + γI)^{2α} − γ^{2α} I] = γ^{2α} Σ ((1 + λ/γ)^{2α} − 1)
    let shifted_trace = |e: &SpdMatrix| -> f64 {
        g2a * e
            .eig()
            .eigenvalues()
            .iter()
            .map(|&l| pow1p_m1(l / gamma, p))
            .sum::<f64>()
    };
    let tr_a = shifted_trace(&cg.aa);
    let tr_b = shifted_trace(&cg.bb);

    let aa_g = cg.aa.scaled(1.0 / gamma)?;
    let bb_g = cg.bb.scaled(1.0 / gamma)?;
    let c11 = aa_g.eig().map(|l| pow1p_m1(l, p));
    let c22 = bb_g.eig().map(|l| pow1p_m1(l, p));
    let h_a = h_alpha(&aa_g, p).into_matrix();
    let h_b = h_alpha(&bb_g, p).into_matrix();
    let ab = &cg.ab;
    let ba = ab.transpose();

    let ab_hb = ab * &h_b / gamma;
    let ba_ha = &ba * &h_a / gamma;
    let c12 = ab_hb.clone();
    let c13 = &c11 * &ab_hb;
    let c21 = ba_ha.clone();
    let c23 = &ba_ha * &ab_hb;

    // rows two and three are identical
    let mut block = DMatrix::zeros(3 * m, 3 * m);
    block.view_mut((0, 0), (m, m)).copy_from(&c11);
    block.view_mut((0, m), (m, m)).copy_from(&c12);
    block.view_mut((0, 2 * m), (m, m)).copy_from(&c13);
    for r in [m, 2 * m] {
        block.view_mut((r, 0), (m, m)).copy_from(&c21);
        block.view_mut((r, m), (m, m)).copy_from(&c22);
        block.view_mut((r, 2 * m), (m, m)).copy_from(&c23);
    }

    // tr[(I + M)^{1/2} − I] = Σ (sqrt(1 + λ_k) − 1)
    let root_trace: f64 = real_spectrum(&block)?
        .into_iter()
        .map(|l| {
            let s = (1.0 + l).max(0.0).sqrt();
            if l > -0.5 {
                l / (s + 1.0)
            } else {
                s - 1.0
            }
        })
        .sum();
    let value = clamp_trace(tr_a + tr_b - 2.0 * g2a * root_trace, tr_a + tr_b)?;
    Ok(value.sqrt() / alpha.abs())
}

/// The same operator distance computed by restricting both covariance
/// operators to an orthonormal basis of `range A + range B`, where they act as
/// `r × r` matrices; on the orthogonal complement both equal `γI` and add
/// nothing. Symmetric and well conditioned, and valid for `m ≠ n` and the
/// logarithmic limit; used as a cross-check of the block-matrix formula.
pub fn covariance_distance_projected(
    cg: &CenteredGram,
    alpha: AlphaParam,
    gamma: f64,
) -> Result<f64> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "regularization gamma must be positive, got {gamma}"
        )));
    }
    let (m, n) = (cg.m(), cg.n());
    let mut joint = DMatrix::zeros(m + n, m + n);
    joint.view_mut((0, 0), (m, m)).copy_from(cg.aa.as_matrix());
    joint.view_mut((0, m), (m, n)).copy_from(&cg.ab);
    joint.view_mut((m, 0), (n, m)).copy_from(&cg.ab.transpose());
    joint.view_mut((m, m), (n, n)).copy_from(cg.bb.as_matrix());
    let eig = sym_eigendecompose(&SymMatrix::new(joint.clone())?)?;
    let cutoff = RANK_TOL * eig.max().max(0.0);
    let keep: Vec<usize> = (0..m + n)
        .filter(|&i| eig.eigenvalues()[i] > cutoff)
        .collect();
    if keep.is_empty() {
        return Ok(0.0);
    }
    // coordinates of the stacked operator [A B] in the basis [A B] V Λ^{-1/2}
    let basis = DMatrix::from_fn(m + n, keep.len(), |i, k| {
        eig.eigenvectors()[(i, keep[k])] / eig.eigenvalues()[keep[k]].sqrt()
    });
    let coords = basis.transpose() * &joint;
    let ca = coords.columns(0, m);
    let cb = coords.columns(m, n);
    let cov_x = SpdMatrix::from_matrix(ca * ca.transpose())?;
    let cov_y = SpdMatrix::from_matrix(cb * cb.transpose())?;
    Ok(alpha_procrustes_regularized(&cov_x, &cov_y, gamma, alpha)?.value)
}

/// Unregularized covariance-operator distance for `α ≥ 1/2`; sample counts may
/// differ.
pub fn covariance_distance_unregularized(cg: &CenteredGram, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha >= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "unregularized RKHS distance needs alpha >= 1/2, got {alpha}"
        )));
    }
    let p = 2.0 * alpha;
    let tr_a: f64 = cg.aa.eig().eigenvalues().iter().map(|l| l.powf(p)).sum();
    let tr_b: f64 = cg.bb.eig().eigenvalues().iter().map(|l| l.powf(p)).sum();
    // tr[(B*A (A*A)^{2α−1} A*B (B*B)^{2α−1})^{1/2}] = ‖(A*A)^{α−½} A*B (B*B)^{α−½}‖_*
    let g = spd_power(&cg.aa, alpha - 0.5)?.as_matrix()
        * &cg.ab
        * spd_power(&cg.bb, alpha - 0.5)?.as_matrix();
    let cross = nuclear_norm(&g)?;
    let value = clamp_trace(tr_a + tr_b - 2.0 * cross, tr_a + tr_b)?;
    Ok(value.sqrt() / alpha)
}

/// Alpha Procrustes distance between `C_Φ(X) + γI` and `C_Φ(Y) + γI`
/// (equal sample counts, `α ≠ 0`, `γ > 0`).
pub fn rkhs_alpha_distance(
    x: &Dataset,
    y: &Dataset,
    k: &KernelSpec,
    alpha: f64,
    gamma: f64,
) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionError(format!(
            "regularized RKHS distance needs equal sample counts, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let cg = CenteredGram::from_bundle(&gram_bundle(x, y, k)?)?;
    covariance_distance_regularized(&cg, alpha, gamma)
}

/// Alpha Procrustes distance between `C_Φ(X)` and `C_Φ(Y)` for `α ≥ 1/2`.
pub fn rkhs_alpha_distance_unregularized(
    x: &Dataset,
    y: &Dataset,
    k: &KernelSpec,
    alpha: f64,
) -> Result<f64> {
    let cg = CenteredGram::from_bundle(&gram_bundle(x, y, k)?)?;
    covariance_distance_unregularized(&cg, alpha)
}

/// Distance between RKHS Gaussian measures, split into its two parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkhsDistance {
    /// `‖μ_Φ(X) − μ_Φ(Y)‖²`
    pub mean_term: f64,
    /// `¼ d²` of the covariance operators.
    pub covariance_term: f64,
    pub distance: f64,
}

impl RkhsDistance {
    fn from_terms(mean_term: f64, covariance_distance: f64) -> Self {
        let covariance_term = 0.25 * covariance_distance * covariance_distance;
        Self {
            mean_term,
            covariance_term,
            distance: (mean_term + covariance_term).sqrt(),
        }
    }
}

/// Covariance distance for `α ≥ 1/2` written directly in the uncentered Gram
/// matrices:
///
/// ```text
/// (1/α) sqrt( tr(J K[X] J)^{2α}/m^{2α} + tr(J K[Y] J)^{2α}/n^{2α}
///           − 2 tr[J K[Y,X] J (J K[X] J)^{2α−1} J K[X,Y] J (J K[Y] J)^{2α−1}]^{1/2} / (mn)^α )
/// ```
pub fn gram_form_covariance_distance(gb: &GramBundle, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha >= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "Gram-form distance needs alpha >= 1/2, got {alpha}"
        )));
    }
    let m = gb.kxx.nrows();
    let n = gb.kyy.nrows();
    let (jm, jn) = (centering(m), centering(n));
    let gx = SpdMatrix::from_matrix(&jm * &gb.kxx * &jm)?;
    let gy = SpdMatrix::from_matrix(&jn * &gb.kyy * &jn)?;
    let gxy = &jm * &gb.kxy * &jn;
    let p = 2.0 * alpha;
    let (mf, nf) = (m as f64, n as f64);
    let tr_x = gx
        .eig()
        .eigenvalues()
        .iter()
        .map(|l| l.powf(p))
        .sum::<f64>()
        / mf.powf(p);
    let tr_y = gy
        .eig()
        .eigenvalues()
        .iter()
        .map(|l| l.powf(p))
        .sum::<f64>()
        / nf.powf(p);
    let g =
        spd_power(&gx, alpha - 0.5)?.as_matrix() * &gxy * spd_power(&gy, alpha - 0.5)?.as_matrix();
    let cross = nuclear_norm(&g)? / (mf * nf).powf(alpha);
    let value = clamp_trace(tr_x + tr_y - 2.0 * cross, tr_x + tr_y)?;
    Ok(value.sqrt() / alpha)
}

/// Alpha Procrustes distance between the Gaussian measures
/// `N(μ_Φ(X), C_Φ(X))` and `N(μ_Φ(Y), C_Φ(Y))`.
///
/// With `γ > 0` the covariance part uses the regularized operators (equal
/// sample counts). With `γ = 0` the unregularized Gram form is used, which
/// needs `α ≥ 1/2` and accepts differing sample counts.
pub fn rkhs_gaussian_distance(
    x: &Dataset,
    y: &Dataset,
    k: &KernelSpec,
    alpha: AlphaParam,
    gamma: f64,
) -> Result<RkhsDistance> {
    if alpha.is_log_limit() {
        return Err(Error::InvalidParameter(
            "the logarithmic limit has no Gram-matrix form for RKHS operators".into(),
        ));
    }
    let gb = gram_bundle(x, y, k)?;
    let mean_term = mean_discrepancy_squared(&gb);
    let cov = if gamma == 0.0 {
        gram_form_covariance_distance(&gb, alpha.value())?
    } else {
        if x.len() != y.len() {
            return Err(Error::DimensionError(format!(
                "regularized RKHS distance needs equal sample counts, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        covariance_distance_regularized(&CenteredGram::from_bundle(&gb)?, alpha.value(), gamma)?
    };
    Ok(RkhsDistance::from_terms(mean_term, cov))
}

/// L²-Wasserstein distance between the RKHS Gaussian measures (any `m, n ≥ 2`).
pub fn rkhs_wasserstein(x: &Dataset, y: &Dataset, k: &KernelSpec) -> Result<RkhsDistance> {
    let gb = gram_bundle(x, y, k)?;
    let mean_term = mean_discrepancy_squared(&gb);
    let m = gb.kxx.nrows();
    let n = gb.kyy.nrows();
    let (jm, jn) = (centering(m), centering(n));
    let tr_x = (&jm * &gb.kxx * &jm).trace() / m as f64;
    let tr_y = (&jn * &gb.kyy * &jn).trace() / n as f64;
    // J_n K[Y,X] J_m K[X,Y] J_n = Wᵀ W with W = J_m K[X,Y] J_n
    let w = &jm * &gb.kxy * &jn;
    let cross = nuclear_norm(&w)? / ((m * n) as f64).sqrt();
    let bw_sq = clamp_trace(tr_x + tr_y - 2.0 * cross, tr_x + tr_y)?;
    // covariance_term holds the squared Bures-Wasserstein part directly
    Ok(RkhsDistance {
        mean_term,
        covariance_term: bw_sq,
        distance: (mean_term + bw_sq).sqrt(),
    })
}

/// Exponent vectors `(k_0, k_1, …, k_dim)` summing to `degree`.
fn exponent_vectors(slots: usize, degree: u32) -> Vec<Vec<u32>> {
    if slots == 1 {
        return vec![vec![degree]];
    }
    let mut out = Vec::new();
    for first in (0..=degree).rev() {
        for mut rest in exponent_vectors(slots - 1, degree - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn multinomial(exps: &[u32]) -> f64 {
    let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
    let total: u32 = exps.iter().sum();
    fact(total) / exps.iter().map(|&k| fact(k)).product::<f64>()
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Explicit finite feature map, one row per sample, such that
/// `Φ(x)·Φ(y) = K(x, y)`.
pub fn explicit_features(x: &Dataset, k: &KernelSpec) -> Result<DMatrix<f64>> {
    match *k {
        KernelSpec::Linear => Ok(x.points().clone()),
        KernelSpec::GaussianRbf { .. } => Err(Error::UnsupportedKernel(k.to_string())),
        KernelSpec::Polynomial { degree, offset } => {
            let dim = x.dim();
            let count = binomial(dim + degree as usize, degree as usize)
                .filter(|&c| c <= MAX_FEATURE_DIM)
                .ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "explicit feature space of {k} on R^{dim} exceeds {MAX_FEATURE_DIM} dimensions"
                    ))
                })?;
            let monomials: Vec<(f64, Vec<u32>)> = exponent_vectors(dim + 1, degree)
                .into_iter()
                .filter_map(|e| {
                    let weight = multinomial(&e) * offset.powi(e[0] as i32);
                    (weight > 0.0).then(|| (weight.sqrt(), e[1..].to_vec()))
                })
                .collect();
            debug_assert!(monomials.len() <= count);
            let rows: Vec<RowDVector<f64>> = x
                .points()
                .row_iter()
                .map(|pt| {
                    RowDVector::from_iterator(
                        monomials.len(),
                        monomials.iter().map(|(w, e)| {
                            w * pt
                                .iter()
                                .zip(e)
                                .map(|(v, &p)| v.powi(p as i32))
                                .product::<f64>()
                        }),
                    )
                })
                .collect();
            Ok(DMatrix::from_rows(&rows))
        }
    }
}

/// Empirical mean and covariance `(1/m) Σ (φ_i − μ)(φ_i − μ)ᵀ` in the explicit
/// feature space.
pub fn explicit_feature_covariance(
    x: &Dataset,
    k: &KernelSpec,
) -> Result<(DVector<f64>, SpdMatrix)> {
    let phi = explicit_features(x, k)?;
    let m = phi.nrows() as f64;
    let mean: DVector<f64> = phi.row_mean().transpose();
    let centered = DMatrix::from_fn(phi.nrows(), phi.ncols(), |i, j| phi[(i, j)] - mean[j]);
    let cov = SpdMatrix::from_matrix(centered.transpose() * &centered / m)?;
    Ok((mean, cov))
}
