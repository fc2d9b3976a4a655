//! Riemannian metric behind the Alpha Procrustes family: generalized Lyapunov
//! solves, the metric tensor, closed-form geodesics and a numerical
//! arc-length check.
//!
//! In the eigenbasis `P₀ = V diag(λ) Vᵀ` the generalized Lyapunov operator
//! `Y = Dexp(log P₀) ∘ Dlog(P₀^{2α}) (H P₀^{2α} + P₀^{2α} H)` is diagonal:
//! `Ỹ_ij = f(λ_i, λ_j) H̃_ij` with
//!
//! ```text
//! f(λ_i, λ_j) = 2α (λ_i − λ_j)(λ_i^{2α} + λ_j^{2α}) / (λ_i^{2α} − λ_j^{2α}),   f(λ, λ) = 2λ.
//! ```

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    loewner_apply, spd_power, AlphaMode, AlphaParam, ScalarFn, SpdMatrix, SymMatrix,
    DIVIDED_DIFF_TOL,
};

/// Eigenbasis factor of the generalized Lyapunov operator.
pub fn lyapunov_factor(li: f64, lj: f64, alpha: AlphaParam) -> f64 {
    if (li - lj).abs() < DIVIDED_DIFF_TOL * li.abs().max(1.0) {
        return 2.0 * li;
    }
    let log_ratio = li.ln() - lj.ln();
    match alpha.mode() {
        AlphaMode::LogLimit => 2.0 * (li - lj) / log_ratio,
        AlphaMode::General => {
            let a = alpha.value();
            let pj = lj.powf(2.0 * a);
            let pi = li.powf(2.0 * a);
            // λ_i^{2α} − λ_j^{2α} without cancellation for small α
            let diff = pj * (2.0 * a * log_ratio).exp_m1();
            2.0 * a * (li - lj) * (pi + pj) / diff
        }
    }
}

fn check_tangent(p0: &SpdMatrix, y: &SymMatrix) -> Result<()> {
    p0.require_strict()?;
    if p0.dim() != y.dim() {
        return Err(Error::DimensionError(format!(
            "base point {}x{} with direction {}x{}",
            p0.dim(),
            p0.dim(),
            y.dim(),
            y.dim()
        )));
    }
    Ok(())
}

/// Solution `H = L_{P₀,α}(Y)` of the generalized Lyapunov equation. At
/// `α = 1/2` this is the ordinary Lyapunov equation `H P₀ + P₀ H = Y`; the
/// log limit gives `H = ½ Dlog(P₀) Y`.
pub fn solve_general_lyapunov(
    p0: &SpdMatrix,
    y: &SymMatrix,
    alpha: AlphaParam,
) -> Result<SymMatrix> {
    check_tangent(p0, y)?;
    let eig = p0.eig();
    let v = eig.eigenvectors();
    let lambda = eig.eigenvalues();
    let mut h = v.transpose() * y.as_matrix() * v;
    let n = p0.dim();
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] /= lyapunov_factor(lambda[i], lambda[j], alpha);
        }
    }
    SymMatrix::new(v * h * v.transpose())
}

/// `⟨Y, Z⟩_{P₀} = 4 tr(L(Y) P₀^{2α} L(Z))`; in the log limit
/// `⟨Dlog(P₀) Y, Dlog(P₀) Z⟩_F`.
pub fn metric_inner(
    p0: &SpdMatrix,
    y: &SymMatrix,
    z: &SymMatrix,
    alpha: AlphaParam,
) -> Result<f64> {
    check_tangent(p0, y)?;
    check_tangent(p0, z)?;
    match alpha.mode() {
        AlphaMode::LogLimit => {
            let dy = loewner_apply(p0.eig(), ScalarFn::Log, y)?;
            let dz = loewner_apply(p0.eig(), ScalarFn::Log, z)?;
            Ok(dy.as_matrix().dot(dz.as_matrix()))
        }
        AlphaMode::General => {
            let hy = solve_general_lyapunov(p0, y, alpha)?;
            let hz = solve_general_lyapunov(p0, z, alpha)?;
            let p2 = spd_power(p0, 2.0 * alpha.value())?;
            let prod = hy.as_matrix() * p2.as_matrix();
            // tr(XY) = Σ X_ij Y_ji; hz is symmetric
            Ok(4.0 * prod.dot(hz.as_matrix()))
        }
    }
}

/// A tangent vector `Y ∈ Sym(n)` at a strictly positive definite base point.
#[derive(Debug, Clone)]
pub struct TangentVector {
    base_point: SpdMatrix,
    direction: SymMatrix,
}

impl TangentVector {
    pub fn new(base_point: SpdMatrix, direction: SymMatrix) -> Result<Self> {
        check_tangent(&base_point, &direction)?;
        Ok(Self {
            base_point,
            direction,
        })
    }

    pub fn base_point(&self) -> &SpdMatrix {
        &self.base_point
    }

    pub fn direction(&self) -> &SymMatrix {
        &self.direction
    }

    pub fn inner(&self, other: &TangentVector, alpha: AlphaParam) -> Result<f64> {
        if self.base_point != other.base_point {
            return Err(Error::DomainError(
                "tangent vectors live at different base points".into(),
            ));
        }
        metric_inner(&self.base_point, &self.direction, &other.direction, alpha)
    }

    pub fn norm(&self, alpha: AlphaParam) -> Result<f64> {
        Ok(
            metric_inner(&self.base_point, &self.direction, &self.direction, alpha)?
                .max(0.0)
                .sqrt(),
        )
    }
}

/// Closed-form geodesic between two SPD matrices for a fixed `α ≠ 0`:
///
/// ```text
/// γ(t) = [(1−t)² A^{2α} + t² B^{2α} + t(1−t)((A^{2α}B^{2α})^{1/2} + (B^{2α}A^{2α})^{1/2})]^{1/(2α)}
/// ```
#[derive(Debug, Clone)]
pub struct GeodesicCurve {
    start: SpdMatrix,
    end: SpdMatrix,
    alpha: f64,
    start_pow: DMatrix<f64>,
    end_pow: DMatrix<f64>,
    cross: DMatrix<f64>,
}

impl GeodesicCurve {
    pub fn new(start: SpdMatrix, end: SpdMatrix, alpha: f64) -> Result<Self> {
        let param = AlphaParam::new(alpha)?;
        if param.is_log_limit() {
            return Err(Error::InvalidParameter(format!(
                "geodesics need alpha != 0, got {alpha}"
            )));
        }
        start.require_strict()?;
        end.require_strict()?;
        if start.dim() != end.dim() {
            return Err(Error::DimensionError(format!(
                "{}x{} vs {}x{}",
                start.dim(),
                start.dim(),
                end.dim(),
                end.dim()
            )));
        }
        let a_half = spd_power(&start, alpha)?;
        let a_half_inv = spd_power(&start, -alpha)?;
        let start_pow = spd_power(&start, 2.0 * alpha)?.as_matrix().clone();
        let end_pow = spd_power(&end, 2.0 * alpha)?.as_matrix().clone();
        // (A^{2α} B^{2α})^{1/2} = A^α (A^α B^{2α} A^α)^{1/2} A^{-α}
        let triple = SpdMatrix::from_matrix(a_half.as_matrix() * &end_pow * a_half.as_matrix())?;
        let root = spd_power(&triple, 0.5)?;
        let r = a_half.as_matrix() * root.as_matrix() * a_half_inv.as_matrix();
        let cross = &r + r.transpose();
        Ok(Self {
            start,
            end,
            alpha,
            start_pow,
            end_pow,
            cross,
        })
    }

    pub fn start(&self) -> &SpdMatrix {
        &self.start
    }

    pub fn end(&self) -> &SpdMatrix {
        &self.end
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eval(&self, t: f64) -> Result<SpdMatrix> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!(
                "geodesic parameter must lie in [0, 1], got {t}"
            )));
        }
        let s = 1.0 - t;
        let bracket = &self.start_pow * (s * s) + &self.end_pow * (t * t) + &self.cross * (t * s);
        let bracket = SpdMatrix::from_matrix(bracket).map_err(|e| match e {
            Error::NotPositiveSemidefinite { min_eig, .. } => Error::NonSpdIntermediate { min_eig },
            other => other,
        })?;
        if !bracket.is_strict() {
            return Err(Error::NonSpdIntermediate {
                min_eig: bracket.min_eig(),
            });
        }
        spd_power(&bracket, 1.0 / (2.0 * self.alpha))
    }
}

/// Convenience wrapper for [`GeodesicCurve::eval`].
pub fn geodesic_eval(curve: &GeodesicCurve, t: f64) -> Result<SpdMatrix> {
    curve.eval(t)
}

/// Arc length of the geodesic under the α-metric, by the midpoint rule with
/// central-difference velocities of step `1/steps`.
pub fn geodesic_length_numeric(curve: &GeodesicCurve, steps: usize) -> Result<f64> {
    if steps < 100 {
        return Err(Error::InvalidParameter(format!(
            "need at least 100 steps, got {steps}"
        )));
    }
    let alpha = AlphaParam::new(curve.alpha)?;
    let dt = 1.0 / steps as f64;
    let nodes = (0..=steps)
        .into_par_iter()
        .map(|k| curve.eval((k as f64 * dt).min(1.0)))
        .collect::<Result<Vec<_>>>()?;
    let speeds = (0..steps)
        .into_par_iter()
        .map(|k| {
            let mid = curve.eval((k as f64 + 0.5) * dt)?;
            let velocity = SymMatrix::new((nodes[k + 1].as_matrix() - nodes[k].as_matrix()) / dt)?;
            Ok(metric_inner(&mid, &velocity, &velocity, alpha)?
                .max(0.0)
                .sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    // sequential sum keeps the result independent of thread scheduling
    Ok(speeds.iter().sum::<f64>() * dt)
}
