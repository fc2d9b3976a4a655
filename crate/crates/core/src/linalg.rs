//! Symmetric matrices, eigendecompositions and the spectral matrix functions
//! every distance in this crate is built from.
//!
//! All matrix functions (power, log, exp, square root, Fréchet derivatives)
//! go through a single symmetric eigendecomposition, so `exp(log A)`,
//! `(A^p)^q` and friends agree to roundoff.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative eigenvalue threshold below which a PSD eigenvalue is treated as zero.
pub const PSD_TOL: f64 = 1e-12;
/// Near-degenerate eigenvalue pairs switch from divided differences to `f'`.
pub const DIVIDED_DIFF_TOL: f64 = 1e-8;
/// Relative rank cut-off used by [`h_alpha`].
pub const RANK_TOL: f64 = 1e-10;
/// `|alpha|` below this routes family formulas to the logarithmic limit.
pub const ALPHA_SWITCH_TOL: f64 = 1e-7;
/// Tolerance on the imaginary parts of spectra that are real in exact arithmetic.
pub const SPECTRUM_TOL: f64 = 1e-8;

const EIGEN_EPS: f64 = f64::EPSILON;
const EIGEN_MAX_ITER: usize = 10_000;

/// Absolute PSD tolerance for a spectrum whose largest eigenvalue is `lambda_max`.
pub fn psd_tol(lambda_max: f64) -> f64 {
    PSD_TOL * lambda_max.max(1.0)
}

pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Dense real symmetric matrix. Symmetry is exact: construction averages the
/// input with its transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        check_finite(&m)?;
        Ok(Self(symmetrize(&m)))
    }

    /// Like [`SymMatrix::new`] but rejects inputs whose asymmetry exceeds
    /// `tol * max(1, max|m_ij|)`.
    pub fn new_checked(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        check_finite(&m)?;
        let scale = m.amax().max(1.0);
        let asymmetry = (&m - m.transpose()).amax();
        if asymmetry > tol * scale {
            return Err(Error::NotSymmetric { asymmetry });
        }
        Ok(Self(symmetrize(&m)))
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionError(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.0)
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix(&self.0 * c)
    }
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl EigenDecomposition {
    /// Builds a decomposition from raw parts, sorting the spectrum ascending.
    fn from_parts(values: DVector<f64>, vectors: DMatrix<f64>) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| values[i]));
        let eigenvectors = DMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `V diag(f(λ)) Vᵀ`, symmetrized.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let fj = f(lambda);
            scaled.column_mut(j).scale_mut(fj);
        }
        symmetrize(&(scaled * v.transpose()))
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.map(|x| x)
    }

    /// New decomposition with the same eigenvectors and `f` applied to the spectrum.
    fn map_spectrum<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self::from_parts(self.eigenvalues.map(f), self.eigenvectors.clone())
    }
}

/// Full symmetric eigendecomposition, eigenvalues ascending.
pub fn sym_eigendecompose(s: &SymMatrix) -> Result<EigenDecomposition> {
    check_finite(s.as_matrix())?;
    let n = s.dim();
    let eig = SymmetricEigen::try_new(s.as_matrix().clone(), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::ConvergenceFailure { dim: n })?;
    Ok(EigenDecomposition::from_parts(
        eig.eigenvalues,
        eig.eigenvectors,
    ))
}

/// Symmetric positive semi-definite matrix together with its (clamped)
/// eigendecomposition.
///
/// Eigenvalues within `psd_tol` of zero are clamped to exactly zero. A matrix
/// is *strict* when its smallest eigenvalue exceeds the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    mat: SymMatrix,
    eig: EigenDecomposition,
    tol: f64,
}

impl SpdMatrix {
    /// Accepts positive semi-definite input, clamping roundoff-sized eigenvalues.
    pub fn new_psd(s: SymMatrix) -> Result<Self> {
        let eig = sym_eigendecompose(&s)?;
        Self::from_decomposition(s, eig)
    }

    /// Accepts only strictly positive definite input.
    pub fn new_strict(s: SymMatrix) -> Result<Self> {
        let m = Self::new_psd(s)?;
        m.require_strict()?;
        Ok(m)
    }

    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        Self::new_psd(SymMatrix::new(m)?)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new_psd(SymMatrix::from_diagonal(diag)?)
    }

    pub fn identity(n: usize) -> Self {
        let eig = EigenDecomposition {
            eigenvalues: DVector::from_element(n, 1.0),
            eigenvectors: DMatrix::identity(n, n),
        };
        Self {
            mat: SymMatrix::identity(n),
            eig,
            tol: psd_tol(1.0),
        }
    }

    fn from_decomposition(mat: SymMatrix, eig: EigenDecomposition) -> Result<Self> {
        let tol = psd_tol(eig.max());
        let min = eig.min();
        if min <= -tol {
            return Err(Error::NotPositiveSemidefinite { min_eig: min, tol });
        }
        let eig = eig.map_spectrum(|l| if l < tol { 0.0 } else { l });
        Ok(Self { mat, eig, tol })
    }

    /// Builds `V diag(values) Vᵀ` from a spectrum that is already known to be
    /// nonnegative.
    fn from_spectrum(eig: EigenDecomposition) -> Result<Self> {
        if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mat = SymMatrix(eig.reconstruct());
        Self::from_decomposition(mat, eig)
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.mat
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        self.mat.as_matrix()
    }

    pub fn eig(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn min_eig(&self) -> f64 {
        self.eig.min()
    }

    pub fn max_eig(&self) -> f64 {
        self.eig.max()
    }

    pub fn psd_tol(&self) -> f64 {
        self.tol
    }

    pub fn is_strict(&self) -> bool {
        self.min_eig() > self.tol
    }

    pub fn require_strict(&self) -> Result<()> {
        if self.is_strict() {
            Ok(())
        } else {
            Err(Error::SingularBase {
                min_eig: self.min_eig(),
                tol: self.tol,
            })
        }
    }

    pub fn trace(&self) -> f64 {
        self.eig.eigenvalues.sum()
    }

    /// `A + γI`, reusing the eigenvectors of `A`.
    pub fn shifted(&self, gamma: f64) -> Result<SpdMatrix> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "shift must be finite and nonnegative, got {gamma}"
            )));
        }
        let n = self.dim();
        let mat = SymMatrix(self.as_matrix() + DMatrix::identity(n, n) * gamma);
        let eig = self.eig.map_spectrum(|l| l + gamma);
        Self::from_decomposition(mat, eig)
    }

    /// `cA` for `c > 0`, reusing the eigenvectors of `A`.
    pub fn scaled(&self, c: f64) -> Result<SpdMatrix> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale must be finite and positive, got {c}"
            )));
        }
        let mat = self.mat.scale(c);
        let eig = self.eig.map_spectrum(|l| l * c);
        Self::from_decomposition(mat, eig)
    }

    /// `Q A Qᵀ` for orthogonal `Q`.
    pub fn conjugate(&self, q: &DMatrix<f64>) -> Result<SpdMatrix> {
        SpdMatrix::from_matrix(q * self.as_matrix() * q.transpose())
    }
}

/// `A^p` through the eigendecomposition of `A`.
///
/// Negative powers need a strictly positive definite base. For `p > 0`, zero
/// eigenvalues map to zero.
pub fn spd_power(a: &SpdMatrix, p: f64) -> Result<SpdMatrix> {
    if !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "power must be finite, got {p}"
        )));
    }
    if p < 0.0 {
        a.require_strict()?;
    }
    if p == 1.0 {
        return Ok(a.clone());
    }
    SpdMatrix::from_spectrum(a.eig.map_spectrum(|l| l.powf(p)))
}

pub fn spd_log(a: &SpdMatrix) -> Result<SymMatrix> {
    a.require_strict()?;
    Ok(SymMatrix(a.eig.map(f64::ln)))
}

pub fn sym_exp(s: &SymMatrix) -> Result<SpdMatrix> {
    let eig = sym_eigendecompose(s)?;
    SpdMatrix::from_spectrum(eig.map_spectrum(f64::exp))
}

pub fn psd_sqrt(a: &SpdMatrix) -> SpdMatrix {
    SpdMatrix::from_spectrum(a.eig.map_spectrum(f64::sqrt))
        .expect("square root of a clamped PSD spectrum is finite and nonnegative")
}

/// `tr[(A^α B^{2α} A^α)^{1/2}]`, computed as the nuclear norm of `A^α B^α`
/// so the inner product is never squared.
pub fn trace_sqrt_triple(a: &SpdMatrix, b: &SpdMatrix, alpha: f64) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionError(format!(
            "{}x{} vs {}x{}",
            a.dim(),
            a.dim(),
            b.dim(),
            b.dim()
        )));
    }
    let a_pow = spd_power(a, alpha)?;
    let b_pow = spd_power(b, alpha)?;
    nuclear_norm(&(a_pow.as_matrix() * b_pow.as_matrix()))
}

/// Diagonal similarity `D⁻¹ M D` with power-of-two entries that brings row
/// and column norms close (Parlett-Reinsch balancing). Eigenvalues are
/// unchanged exactly; their computed accuracy improves for badly scaled `M`.
pub fn balance(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut b = m.clone();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in (0..n).filter(|&j| j != i) {
                c += b[(j, i)].abs();
                r += b[(i, j)].abs();
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let total = c + r;
            let mut f = 1.0;
            let mut g = r / 2.0;
            while c < g {
                f *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while c > g {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + r) / f < 0.95 * total {
                converged = false;
                b.row_mut(i).scale_mut(1.0 / f);
                b.column_mut(i).scale_mut(f);
            }
        }
    }
    b
}

/// Real parts of the eigenvalues of a general square matrix whose spectrum is
/// real in exact arithmetic.
///
/// Fails with [`Error::ComplexSpectrum`] when an imaginary part exceeds both
/// `SPECTRUM_TOL * (1 + |λ|)` and the roundoff floor
/// `sqrt(ε ‖M‖_F) + 64 ε ‖M‖_F`. A backward-stable solver perturbs `M` by
/// about `ε ‖M‖_F`, which moves simple eigenvalues by that much and splits a
/// defective zero eigenvalue into a complex pair of size `sqrt(ε ‖M‖_F)`.
pub fn real_spectrum(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    check_finite(m)?;
    let n = m.nrows();
    let noise = f64::EPSILON * m.norm();
    let floor = noise.sqrt() + 64.0 * noise;
    let schur = nalgebra::Schur::try_new(balance(m), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::ConvergenceFailure { dim: n })?;
    schur
        .complex_eigenvalues()
        .iter()
        .map(|z| {
            let tol = SPECTRUM_TOL * (1.0 + z.norm());
            if z.im.abs() > tol.max(floor) {
                Err(Error::ComplexSpectrum { imag: z.im, tol })
            } else {
                Ok(z.re)
            }
        })
        .collect()
}

/// `tr[M^{1/2}]` for a matrix similar to a PSD one, computed from its
/// eigenvalues with negative real parts clamped to zero.
pub fn trace_sqrt_general(m: &DMatrix<f64>) -> Result<f64> {
    Ok(real_spectrum(m)?
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .sum())
}

/// Sum of singular values. `tr[(MᵀM)^{1/2}]` without squaring the condition
/// number.
pub fn nuclear_norm(m: &DMatrix<f64>) -> Result<f64> {
    check_finite(m)?;
    let svd = nalgebra::SVD::try_new(m.clone(), false, false, EIGEN_EPS, EIGEN_MAX_ITER).ok_or(
        Error::ConvergenceFailure {
            dim: m.nrows().max(m.ncols()),
        },
    )?;
    Ok(svd.singular_values.iter().sum())
}

/// Scalar functions with a known derivative, for Fréchet derivatives via
/// divided differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarFn {
    Exp,
    Log,
    Power(f64),
}

impl ScalarFn {
    pub fn value(self, x: f64) -> f64 {
        match self {
            ScalarFn::Exp => x.exp(),
            ScalarFn::Log => x.ln(),
            ScalarFn::Power(p) => x.powf(p),
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            ScalarFn::Exp => x.exp(),
            ScalarFn::Log => 1.0 / x,
            ScalarFn::Power(p) => p * x.powf(p - 1.0),
        }
    }

    /// First divided difference `[λ_i, λ_j]f`.
    pub fn divided_difference(self, li: f64, lj: f64) -> f64 {
        if (li - lj).abs() < DIVIDED_DIFF_TOL * li.abs().max(1.0) {
            self.derivative(li)
        } else {
            (self.value(li) - self.value(lj)) / (li - lj)
        }
    }
}

/// Fréchet derivative `Df(P)[S]` given the eigendecomposition of `P`
/// (Daleckii–Krein: Hadamard product with the divided-difference matrix in the
/// eigenbasis).
pub fn loewner_apply(p: &EigenDecomposition, f: ScalarFn, s: &SymMatrix) -> Result<SymMatrix> {
    if p.dim() != s.dim() {
        return Err(Error::DimensionError(format!(
            "eigenbasis of size {} applied to {}x{} direction",
            p.dim(),
            s.dim(),
            s.dim()
        )));
    }
    let lambda = p.eigenvalues();
    if matches!(f, ScalarFn::Log) {
        let tol = psd_tol(p.max());
        if let Some(&bad) = lambda.iter().find(|&&l| l <= tol) {
            return Err(Error::DomainError(format!(
                "log derivative at eigenvalue {bad:e}"
            )));
        }
    }
    let v = p.eigenvectors();
    let mut inner = v.transpose() * s.as_matrix() * v;
    let n = p.dim();
    for i in 0..n {
        for j in 0..n {
            inner[(i, j)] *= f.divided_difference(lambda[i], lambda[j]);
        }
    }
    SymMatrix::new(v * inner * v.transpose())
}

/// `h_α(E)`: acts as `((1+λ)^α − 1)/λ` on eigenvectors of `E` with
/// `λ > RANK_TOL·λ_max` and as zero on the (numerical) kernel.
pub fn h_alpha(e: &SpdMatrix, alpha: f64) -> SymMatrix {
    let cutoff = RANK_TOL * e.max_eig();
    SymMatrix(e.eig.map(|l| {
        if l > cutoff && l > 0.0 {
            (alpha * l.ln_1p()).exp_m1() / l
        } else {
            0.0
        }
    }))
}

/// Which formula a family member evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaMode {
    General,
    LogLimit,
}

/// The family parameter `α`, with `α = 0` represented by its analytic limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaParam {
    value: f64,
    mode: AlphaMode,
}

impl AlphaParam {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite, got {value}"
            )));
        }
        let mode = if value.abs() < ALPHA_SWITCH_TOL {
            AlphaMode::LogLimit
        } else {
            AlphaMode::General
        };
        Ok(Self { value, mode })
    }

    pub fn log_limit() -> Self {
        Self {
            value: 0.0,
            mode: AlphaMode::LogLimit,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn mode(&self) -> AlphaMode {
        self.mode
    }

    pub fn is_log_limit(&self) -> bool {
        self.mode == AlphaMode::LogLimit
    }
}

impl fmt::Display for AlphaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            AlphaMode::LogLimit => f.write_str("log-limit"),
            AlphaMode::General => write!(f, "{}", self.value),
        }
    }
}

impl FromStr for AlphaParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("log-limit") || s.eq_ignore_ascii_case("log") {
            return Ok(Self::log_limit());
        }
        let value: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("invalid alpha '{s}'")))?;
        Self::new(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::E;

    fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        frobenius(&(a - b)) / frobenius(b).max(1e-300)
    }

    #[test]
    fn eigendecompose_diagonal_sorts_ascending() {
        let s = SymMatrix::from_diagonal(&[3.0, 1.0]).unwrap();
        let eig = sym_eigendecompose(&s).unwrap();
        assert_eq!(eig.eigenvalues().as_slice(), &[1.0, 3.0]);
        let v = eig.eigenvectors();
        assert_relative_eq!(v[(1, 0)].abs(), 1.0);
        assert_relative_eq!(v[(0, 1)].abs(), 1.0);
    }

    #[test]
    fn eigendecompose_random_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let s = sample::random_sym(&mut rng, 5);
            let eig = sym_eigendecompose(&s).unwrap();
            assert!(rel_err(&eig.reconstruct(), s.as_matrix()) < 1e-10);
            let v = eig.eigenvectors();
            let gram = v.transpose() * v;
            assert!(frobenius(&(gram - DMatrix::identity(5, 5))) < 1e-12 * 5.0);
            let l = eig.eigenvalues();
            assert!(l.iter().zip(l.iter().skip(1)).all(|(a, b)| a <= b));
        }
    }

    #[test]
    fn eigendecompose_rejects_nan() {
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        assert_eq!(SymMatrix::new(m), Err(Error::NonFinite));
    }

    #[test]
    fn power_identity_and_diagonal() {
        let i = SpdMatrix::identity(3);
        assert!(
            rel_err(
                spd_power(&i, 0.37).unwrap().as_matrix(),
                &DMatrix::identity(3, 3)
            ) < 1e-15
        );
        let a = SpdMatrix::from_diagonal(&[4.0, 9.0]).unwrap();
        let r = spd_power(&a, 0.5).unwrap();
        assert_relative_eq!(r.as_matrix()[(0, 0)], 2.0, epsilon = 1e-14);
        assert_relative_eq!(r.as_matrix()[(1, 1)], 3.0, epsilon = 1e-14);
        assert_eq!(r.as_matrix()[(0, 1)], 0.0);
    }

    #[test]
    fn power_two_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..7 {
            let a = sample::random_spd(&mut rng, n);
            let sq = spd_power(&a, 2.0).unwrap();
            let direct = a.as_matrix() * a.as_matrix();
            assert!(rel_err(sq.as_matrix(), &direct) < 1e-12);
        }
    }

    #[test]
    fn negative_power_of_singular_fails() {
        let a = SpdMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            spd_power(&a, -0.5),
            Err(Error::SingularBase { .. })
        ));
        assert!(spd_power(&a, 0.5).is_ok());
    }

    #[test]
    fn psd_clamps_tiny_negative_and_rejects_large_negative() {
        let a = SpdMatrix::from_diagonal(&[2.0, -1e-14]).unwrap();
        assert_eq!(a.min_eig(), 0.0);
        assert!(!a.is_strict());
        assert!(matches!(
            SpdMatrix::from_diagonal(&[2.0, -1e-6]),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        assert!(matches!(
            SpdMatrix::new_strict(SymMatrix::from_diagonal(&[1.0, 0.0]).unwrap()),
            Err(Error::SingularBase { .. })
        ));
    }

    #[test]
    fn log_of_identity_and_diagonal() {
        let l = spd_log(&SpdMatrix::identity(3)).unwrap();
        assert_eq!(l.frobenius_norm(), 0.0);
        let a = SpdMatrix::from_diagonal(&[E, E * E]).unwrap();
        let l = spd_log(&a).unwrap();
        assert_relative_eq!(l.as_matrix()[(0, 0)], 1.0, epsilon = 1e-14);
        assert_relative_eq!(l.as_matrix()[(1, 1)], 2.0, epsilon = 1e-14);
        let singular = SpdMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            spd_log(&singular),
            Err(Error::SingularBase { .. })
        ));
    }

    #[test]
    fn exp_log_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..8 {
            let a = sample::random_spd(&mut rng, n);
            let back = sym_exp(&spd_log(&a).unwrap()).unwrap();
            assert!(rel_err(back.as_matrix(), a.as_matrix()) < 1e-10);
        }
    }

    #[test]
    fn exp_of_zero_and_diagonal() {
        let e0 = sym_exp(&SymMatrix::zeros(2)).unwrap();
        assert!(rel_err(e0.as_matrix(), &DMatrix::identity(2, 2)) < 1e-15);
        let e = sym_exp(&SymMatrix::from_diagonal(&[1.0, 2.0]).unwrap()).unwrap();
        assert_relative_eq!(e.as_matrix()[(0, 0)], E, epsilon = 1e-14);
        assert_relative_eq!(e.as_matrix()[(1, 1)], E * E, epsilon = 1e-13);
    }

    #[test]
    fn exp_matches_power_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let s = sample::random_sym(&mut rng, 4).scale(0.2);
            // truncated Taylor series, 20 terms
            let m = s.as_matrix();
            let mut term = DMatrix::<f64>::identity(4, 4);
            let mut series = term.clone();
            for k in 1..20 {
                term = &term * m / k as f64;
                series += &term;
            }
            let e = sym_exp(&s).unwrap();
            assert!(rel_err(e.as_matrix(), &series) < 1e-10);
        }
    }

    #[test]
    fn sqrt_examples() {
        let a = SpdMatrix::from_diagonal(&[4.0, 16.0]).unwrap();
        let r = psd_sqrt(&a);
        assert_relative_eq!(r.as_matrix()[(0, 0)], 2.0, epsilon = 1e-14);
        assert_relative_eq!(r.as_matrix()[(1, 1)], 4.0, epsilon = 1e-14);
        let i = psd_sqrt(&SpdMatrix::identity(3));
        assert!(rel_err(i.as_matrix(), &DMatrix::identity(3, 3)) < 1e-15);
    }

    #[test]
    fn sqrt_rank_deficient_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let a = sample::random_psd_rank(&mut rng, 3, 2);
            assert!(!a.is_strict());
            let r = psd_sqrt(&a);
            assert!(r.min_eig() >= 0.0);
            let back = r.as_matrix() * r.as_matrix();
            assert!(rel_err(&back, a.as_matrix()) < 1e-9);
        }
    }

    #[test]
    fn trace_sqrt_triple_examples() {
        let i = SpdMatrix::identity(2);
        assert_relative_eq!(
            trace_sqrt_triple(&i, &i, 1.0).unwrap(),
            2.0,
            epsilon = 1e-14
        );
        let a = SpdMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
        let b = SpdMatrix::from_diagonal(&[9.0, 16.0]).unwrap();
        assert_relative_eq!(
            trace_sqrt_triple(&a, &b, 0.5).unwrap(),
            11.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn trace_sqrt_triple_matches_product_spectrum() {
        // tr(A^α B^{2α} A^α)^{1/2} = Σ sqrt(λ_k(A^{2α} B^{2α}))
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for &alpha in &[0.3, 0.5, 0.7, 1.0, -0.5] {
            for n in 2..6 {
                let a = sample::random_spd(&mut rng, n);
                let b = sample::random_spd(&mut rng, n);
                let prod = spd_power(&a, 2.0 * alpha).unwrap().as_matrix()
                    * spd_power(&b, 2.0 * alpha).unwrap().as_matrix();
                let oracle: f64 = prod
                    .complex_eigenvalues()
                    .iter()
                    .map(|z| z.re.max(0.0).sqrt())
                    .sum();
                let got = trace_sqrt_triple(&a, &b, alpha).unwrap();
                assert_relative_eq!(got, oracle, max_relative = 1e-9);
                let swapped = trace_sqrt_triple(&b, &a, alpha).unwrap();
                assert_relative_eq!(got, swapped, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn loewner_log_at_identity_is_identity_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = sample::random_sym(&mut rng, 4);
        let eig = SpdMatrix::identity(4).eig().clone();
        let d = loewner_apply(&eig, ScalarFn::Log, &s).unwrap();
        assert!(rel_err(d.as_matrix(), s.as_matrix()) < 1e-15);
    }

    #[test]
    fn loewner_log_matches_finite_difference() {
        let p0 = SpdMatrix::from_diagonal(&[1.0, E]).unwrap();
        let s = SymMatrix::from_row_slice(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let d = loewner_apply(p0.eig(), ScalarFn::Log, &s).unwrap();
        // forward difference (log(P0 + hS) - log(P0)) / h with h = 1e-6
        let h = 1e-6;
        let shifted = SpdMatrix::from_matrix(p0.as_matrix() + s.as_matrix() * h).unwrap();
        let fd =
            (spd_log(&shifted).unwrap().into_matrix() - spd_log(&p0).unwrap().into_matrix()) / h;
        assert_relative_eq!(fd[(0, 1)], 0.581977, epsilon = 1e-6);
        assert_relative_eq!(d.as_matrix()[(0, 1)], 0.581977, epsilon = 1e-6);
        assert_relative_eq!(d.as_matrix()[(0, 1)], 1.0 / (E - 1.0), epsilon = 1e-15);
        assert_eq!(d.as_matrix()[(0, 0)], 0.0);
        assert_eq!(d.as_matrix()[(1, 1)], 0.0);
    }

    #[test]
    fn loewner_exp_after_log_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 2..6 {
            let p0 = sample::random_spd(&mut rng, n);
            let s = sample::random_sym(&mut rng, n);
            let log_p0 = spd_log(&p0).unwrap();
            let log_eig = sym_eigendecompose(&log_p0).unwrap();
            let inner = loewner_apply(p0.eig(), ScalarFn::Log, &s).unwrap();
            let back = loewner_apply(&log_eig, ScalarFn::Exp, &inner).unwrap();
            assert!(frobenius(&(back.as_matrix() - s.as_matrix())) < 1e-9 * s.frobenius_norm());
        }
    }

    #[test]
    fn loewner_log_rejects_singular() {
        let p0 = SpdMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let s = SymMatrix::identity(2);
        assert!(matches!(
            loewner_apply(p0.eig(), ScalarFn::Log, &s),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn h_alpha_examples() {
        let h = h_alpha(&SpdMatrix::identity(3), 0.7);
        let expect = 2f64.powf(0.7) - 1.0;
        assert!(rel_err(h.as_matrix(), &(DMatrix::identity(3, 3) * expect)) < 1e-14);

        let e = SpdMatrix::from_diagonal(&[3.0, 0.0]).unwrap();
        let h = h_alpha(&e, 1.0);
        assert_relative_eq!(h.as_matrix()[(0, 0)], 1.0, epsilon = 1e-15);
        assert_eq!(h.as_matrix()[(1, 1)], 0.0);
        let eh = e.as_matrix() * h.as_matrix();
        assert_relative_eq!(eh[(0, 0)], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn h_alpha_identity_on_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let e = sample::random_psd_rank(&mut rng, 5, 3);
            let h = h_alpha(&e, 0.8);
            let lhs = e.as_matrix() * h.as_matrix();
            let shifted = e.shifted(1.0).unwrap();
            let rhs = spd_power(&shifted, 0.8).unwrap().as_matrix() - DMatrix::identity(5, 5);
            // compare on range(E): project with the range projector
            let proj = e.eig().map(|l| if l > 0.0 { 1.0 } else { 0.0 });
            let diff = &proj * (lhs - rhs) * &proj;
            assert!(frobenius(&diff) < 1e-10);
        }
    }

    #[test]
    fn alpha_param_modes() {
        assert!(AlphaParam::new(1e-8).unwrap().is_log_limit());
        assert!(!AlphaParam::new(1e-6).unwrap().is_log_limit());
        assert!(AlphaParam::new(f64::NAN).is_err());
        assert!("log-limit".parse::<AlphaParam>().unwrap().is_log_limit());
        assert_eq!("0.5".parse::<AlphaParam>().unwrap().value(), 0.5);
        assert!("abc".parse::<AlphaParam>().is_err());
        assert_eq!(AlphaParam::log_limit().to_string(), "log-limit");
    }

    #[test]
    fn real_spectrum_rejects_rotation() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(matches!(
            real_spectrum(&m),
            Err(Error::ComplexSpectrum { .. })
        ));
    }
}
