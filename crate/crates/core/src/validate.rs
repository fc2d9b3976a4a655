//! Randomized property suites: metric axioms, the trace-inequality comparison,
//! limit checks, Lyapunov residuals, geodesic length and the RKHS reductions.
//!
//! Every suite draws its inputs from a ChaCha RNG seeded from the run seed and
//! the suite index, so a failing witness is reproducible from the seed alone.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gaussian::{
    gaussian_alpha_distance, gaussian_alpha_distance_regularized, GaussianMeasure, MeanMetricSpec,
};
use crate::linalg::{
    frobenius, loewner_apply, spd_log, spd_power, sym_eigendecompose, AlphaParam, ScalarFn,
    SpdMatrix, SymMatrix,
};
use crate::metrics::{
    alpha_procrustes, alpha_procrustes_regularized, bures_wasserstein, log_euclidean,
    power_euclidean, procrustes_bruteforce_2x2,
};
use crate::riemann::{geodesic_length_numeric, solve_general_lyapunov, GeodesicCurve};
use crate::rkhs::{
    explicit_feature_covariance, rkhs_alpha_distance, rkhs_gaussian_distance, rkhs_wasserstein,
    KernelSpec,
};
use crate::sample;

/// Upper-bound tolerances used by the suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub half_coincidence_rel: f64,
    pub log_limit_rel: f64,
    pub bruteforce_abs: f64,
    pub commuting_equality_rel: f64,
    pub triangle_slack: f64,
    pub self_distance: f64,
    pub lyapunov_residual_rel: f64,
    pub lyapunov_half_rel: f64,
    pub geodesic_endpoint_rel: f64,
    pub geodesic_length_rel: f64,
    pub gamma_limit_rel: f64,
    pub kernel_reduction_rel: f64,
    pub orbit_invariance_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            half_coincidence_rel: 1e-10,
            log_limit_rel: 1e-3,
            bruteforce_abs: 1e-6,
            commuting_equality_rel: 1e-10,
            triangle_slack: 1e-9,
            self_distance: 1e-6,
            lyapunov_residual_rel: 1e-9,
            lyapunov_half_rel: 1e-10,
            geodesic_endpoint_rel: 1e-9,
            geodesic_length_rel: 5e-3,
            gamma_limit_rel: 1e-3,
            kernel_reduction_rel: 1e-8,
            orbit_invariance_rel: 1e-9,
        }
    }
}

impl Tolerances {
    /// Every tolerance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            half_coincidence_rel: self.half_coincidence_rel * factor,
            log_limit_rel: self.log_limit_rel * factor,
            bruteforce_abs: self.bruteforce_abs * factor,
            commuting_equality_rel: self.commuting_equality_rel * factor,
            triangle_slack: self.triangle_slack * factor,
            self_distance: self.self_distance * factor,
            lyapunov_residual_rel: self.lyapunov_residual_rel * factor,
            lyapunov_half_rel: self.lyapunov_half_rel * factor,
            geodesic_endpoint_rel: self.geodesic_endpoint_rel * factor,
            geodesic_length_rel: self.geodesic_length_rel * factor,
            gamma_limit_rel: self.gamma_limit_rel * factor,
            kernel_reduction_rel: self.kernel_reduction_rel * factor,
            orbit_invariance_rel: self.orbit_invariance_rel * factor,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidationConfig {
    pub seed: u64,
    pub trials: usize,
    pub tolerances: Tolerances,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            seed: 20190101,
            trials: 50,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checks: usize,
    pub failures: usize,
    /// Largest observed error divided by its tolerance.
    pub worst_ratio: f64,
    /// Description of the first failing check and its inputs.
    pub witness: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub seed: u64,
    pub trials: usize,
    pub suites: Vec<SuiteOutcome>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteOutcome::passed)
    }

    /// Fixed-width pass/fail table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "seed={} trials={}", self.seed, self.trials);
        let _ = writeln!(
            out,
            "{:<26} {:>7} {:>8} {:>12}  status",
            "suite", "checks", "failures", "worst/tol"
        );
        for s in &self.suites {
            let _ = writeln!(
                out,
                "{:<26} {:>7} {:>8} {:>12.4e}  {}",
                s.name,
                s.checks,
                s.failures,
                s.worst_ratio,
                if s.passed() { "PASS" } else { "FAIL" }
            );
        }
        for s in self.suites.iter().filter(|s| !s.passed()) {
            if let Some(w) = &s.witness {
                let _ = writeln!(out, "FAILED {}: {}", s.name, w);
            }
        }
        out
    }
}

struct Tracker {
    name: &'static str,
    checks: usize,
    failures: usize,
    worst_ratio: f64,
    witness: Option<String>,
}

impl Tracker {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: 0,
            failures: 0,
            worst_ratio: 0.0,
            witness: None,
        }
    }

    /// Records `error <= tol`.
    fn within(&mut self, error: f64, tol: f64, witness: impl FnOnce() -> String) {
        let ratio = if tol > 0.0 {
            error / tol
        } else if error == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        self.record(error <= tol, ratio, witness);
    }

    fn holds(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.record(ok, if ok { 0.0 } else { f64::INFINITY }, witness);
    }

    fn record(&mut self, ok: bool, ratio: f64, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if ratio.is_nan() {
            self.worst_ratio = f64::NAN;
        } else if ratio > self.worst_ratio {
            self.worst_ratio = ratio;
        }
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    fn error(&mut self, e: Error, context: impl FnOnce() -> String) {
        self.holds(false, || format!("{}: {e}", context()));
    }

    fn finish(self) -> SuiteOutcome {
        SuiteOutcome {
            name: self.name,
            checks: self.checks,
            failures: self.failures,
            worst_ratio: self.worst_ratio,
            witness: self.witness,
        }
    }
}

fn show(m: &DMatrix<f64>) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| {
            let v: Vec<String> = r.iter().map(|x| format!("{x:.17e}")).collect();
            format!("[{}]", v.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn alpha(v: f64) -> AlphaParam {
    AlphaParam::new(v).expect("finite alpha")
}

type PairDistance<'a> = Box<dyn Fn(usize, usize) -> Result<f64> + 'a>;

/// Relative commutator below which a pair is not treated as non-commuting.
pub const NONCOMMUTING_MIN: f64 = 0.05;

type Suite = fn(&mut ChaCha8Rng, usize, &Tolerances) -> SuiteOutcome;

const SUITES: &[Suite] = &[
    suite_half_coincidence,
    suite_log_limit,
    suite_bruteforce,
    suite_trace_inequality,
    suite_metric_axioms,
    suite_orbit_invariance,
    suite_lyapunov,
    suite_geodesic,
    suite_gamma_limit,
    suite_rkhs_reduction,
];

/// Runs every suite. Fails only on invalid configuration; property failures
/// are reported in the returned report.
pub fn run_validation(cfg: &ValidationConfig) -> Result<ValidationReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter(
            "validation needs at least one trial".into(),
        ));
    }
    let suites = SUITES
        .iter()
        .enumerate()
        .map(|(i, suite)| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ i as u64);
            suite(&mut rng, cfg.trials, &cfg.tolerances)
        })
        .collect();
    Ok(ValidationReport {
        seed: cfg.seed,
        trials: cfg.trials,
        suites,
    })
}

fn suite_half_coincidence(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> SuiteOutcome {
    let mut t = Tracker::new("alpha-half-coincidence");
    for _ in 0..trials {
        let n = rng.random_range(2..=8);
        let a = sample::random_spd(rng, n);
        let b = sample::random_spd(rng, n);
        match (
            alpha_procrustes(&a, &b, alpha(0.5)),
            bures_wasserstein(&a, &b),
        ) {
            (Ok(d), Ok(bw)) => t.within(
                rel(d.value, 2.0 * bw.value),
                tol.half_coincidence_rel,
                || format!("A={} B={}", show(a.as_matrix()), show(b.as_matrix())),
            ),
            (Err(e), _) | (_, Err(e)) => t.error(e, || format!("A={}", show(a.as_matrix()))),
        }
    }
    t.finish()
}

fn suite_log_limit(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> SuiteOutcome {
    let mut t = Tracker::new("log-euclidean-limit");
    for _ in 0..trials.min(20) {
        let n = rng.random_range(2..=6);
        let a = sample::random_spd(rng, n);
        let b = sample::random_spd(rng, n);
        let witness = || format!("A={} B={}", show(a.as_matrix()), show(b.as_matrix()));
        let le = match log_euclidean(&a, &b) {
            Ok(r) => r.value,
            Err(e) => {
                t.error(e, witness);
                continue;
            }
        };
        let gaps: Result<Vec<f64>> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&al| alpha_procrustes(&a, &b, alpha(al)).map(|r| (r.value - le).abs()))
            .collect();
        match gaps {
            Ok(g) => {
                t.holds(g[0] > g[1] && g[1] > g[2], || {
                    format!("gaps {g:?} not decreasing; {}", witness())
                });
                t.within(g[2] / le, tol.log_limit_rel, witness);
            }
            Err(e) => t.error(e, witness),
        }
    }
    t.finish()
}

fn suite_bruteforce(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> SuiteOutcome {
    let mut t = Tracker::new("procrustes-bruteforce-2x2");
    for _ in 0..trials {
        let a = sample::random_spd(rng, 2);
        let b = sample::random_spd(rng, 2);
        for al in [-1.0, 0.5, 0.7, 2.0] {
            let witness = || {
                format!(
                    "alpha={al} A={} B={}",
                    show(a.as_matrix()),
                    show(b.as_matrix())
                )
            };
            match (
                procrustes_bruteforce_2x2(&a, &b, al, 720),
                alpha_procrustes(&a, &b, alpha(al)),
            ) {
                (Ok(bf), Ok(cf)) => t.within((bf - cf.value).abs(), tol.bruteforce_abs, witness),
                (Err(e), _) | (_, Err(e)) => t.error(e, witness),
            }
        }
    }
    t.finish()
}

fn suite_trace_inequality(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> SuiteOutcome {
    let mut t = Tracker::new("power-euclidean-comparison");
    for _ in 0..trials {
        let n = rng.random_range(2..=6);
        let al = [-1.0, 0.5, 0.7, 2.0][rng.random_range(0..4)];
        let (a, b) = sample::random_commuting_pair(rng, n);
        let (c, d) = sample::random_noncommuting_pair(rng, n, NONCOMMUTING_MIN);
        let witness = |x: &SpdMatrix, y: &SpdMatrix| {
            format!(
                "alpha={al} A={} B={}",
                show(x.as_matrix()),
                show(y.as_matrix())
            )
        };
        match (
            alpha_procrustes(&a, &b, alpha(al)),
            power_euclidean(&a, &b, al),
        ) {
            (Ok(ap), Ok(pe)) => {
                t.within(rel(ap.value, pe.value), tol.commuting_equality_rel, || {
                    witness(&a, &b)
                });
            }
            (Err(e), _) | (_, Err(e)) => t.error(e, || witness(&a, &b)),
        }
        match (
            alpha_procrustes(&c, &d, alpha(al)),
            power_euclidean(&c, &d, al),
        ) {
            (Ok(ap), Ok(pe)) => {
                t.holds(ap.value <= pe.value + 1e-10, || {
                    format!("procrustes exceeds power-Euclidean; {}", witness(&c, &d))
                });
                t.holds(pe.value - ap.value > 1e-6, || {
                    format!("no strict gap on non-commuting pair; {}", witness(&c, &d))
                });
            }
            (Err(e), _) | (_, Err(e)) => t.error(e, || witness(&c, &d)),
        }
    }
    t.finish()
}

fn suite_metric_axioms(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> SuiteOutcome {
    let mut t = Tracker::new("metric-axioms");
    let alphas = [
        alpha(-1.0),
        AlphaParam::log_limit(),
        alpha(0.5),
        alpha(1.0),
        alpha(2.0),
    ];
    let euclid = MeanMetricSpec::Euclidean;
    for k in 0..trials {
        let n = rng.random_range(2..=6);
        let al = alphas[k % alphas.len()];
        let mats: Vec<SpdMatrix> = (0..3).map(|_| sample::random_spd(rng, n)).collect();
        let gauss: Vec<GaussianMeasure> = (0..3).map(|_| sample::random_gaussian(rng, n)).collect();
        let psd: Vec<SpdMatrix> = (0..3)
            .map(|_| sample::random_psd_rank(rng, n, n.div_ceil(2)))
            .collect();
        let gamma = 0.1;

        let families: [(&str, PairDistance); 3] = [
            (
                "matrix",
                Box::new(|i, j| alpha_procrustes(&mats[i], &mats[j], al).map(|r| r.value)),
            ),
            (
                "gaussian",
                Box::new(|i, j| gaussian_alpha_distance(&gauss[i], &gauss[j], al, &euclid)),
            ),
            (
                "regularized",
                Box::new(|i, j| {
                    alpha_procrustes_regularized(&psd[i], &psd[j], gamma, al).map(|r| r.value)
                }),
            ),
        ];
        for (name, dist) in &families {
            let witness = || format!("{name} alpha={al} seed-trial={k} n={n}");
            let vals: Result<Vec<f64>> = [(0, 1), (1, 2), (0, 2), (1, 0), (0, 0)]
                .iter()
                .map(|&(i, j)| dist(i, j))
                .collect();
            match vals {
                Ok(v) => {
                    let (d01, d12, d02, d10, d00) = (v[0], v[1], v[2], v[3], v[4]);
                    t.within((d01 + d12 - d02).min(0.0).abs(), tol.triangle_slack, || {
                        format!("triangle violated: {d01} + {d12} < {d02}; {}", witness())
                    });
                    t.holds(d01 == d10, || {
                        format!("asymmetric: {d01} vs {d10}; {}", witness())
                    });
                    t.within(d00, tol.self_distance, || {
                        format!("self-distance {d00}; {}", witness())
                    });
                    t.holds(d01 > tol.self_distance, || {
                        format!("distinct inputs at distance {d01}; {}", witness())
                    });
                }
                Err(e) => t.error(e, witness),
            }
        }
    }
    t.finish()
}

fn suite_orbit_invariance(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> SuiteOutcome {
    let mut t = Tracker::new("orthogonal-invariance");
    for _ in 0..trials {
        let n = rng.random_range(2..=6);
        let al = [-0.5, 0.3, 0.5, 1.5][rng.random_range(0..4)];
        let a = sample::random_spd(rng, n);
        let b = sample::random_spd(rng, n);
        let q = sample::random_orthogonal(rng, n);
        let witness = || {
            format!(
                "alpha={al} A={} B={} Q={}",
                show(a.as_matrix()),
                show(b.as_matrix()),
                show(&q)
            )
        };
        let run = || -> Result<(f64, f64)> {
            let d = alpha_procrustes(&a, &b, alpha(al))?.value;
            let dq = alpha_procrustes(&a.conjugate(&q)?, &b.conjugate(&q)?, alpha(al))?.value;
            Ok((d, dq))
        };
        match run() {
            Ok((d, dq)) => t.within(rel(dq, d), tol.orbit_invariance_rel, witness),
            Err(e) => t.error(e, witness),
        }
    }
    t.finish()
}

/// `Dexp(log P₀) ∘ Dlog(P₀^{2α}) (H P₀^{2α} + P₀^{2α} H)`, for residual checks.
pub fn lyapunov_forward(p0: &SpdMatrix, h: &SymMatrix, alpha: f64) -> Result<SymMatrix> {
    let p2 = spd_power(p0, 2.0 * alpha)?;
    let inner = SymMatrix::new(h.as_matrix() * p2.as_matrix() + p2.as_matrix() * h.as_matrix())?;
    let dlog = loewner_apply(p2.eig(), ScalarFn::Log, &inner)?;
    let log_eig = sym_eigendecompose(&spd_log(p0)?)?;
    loewner_apply(&log_eig, ScalarFn::Exp, &dlog)
}

fn suite_lyapunov(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> SuiteOutcome {
    let mut t = Tracker::new("generalized-lyapunov");
    for _ in 0..trials {
        let n = rng.random_range(2..=6);
        let al = rng.random_range(-1.5..2.0);
        let p0 = sample::random_spd(rng, n);
        let y = sample::random_sym(rng, n);
        let witness = || {
            format!(
                "alpha={al} P0={} Y={}",
                show(p0.as_matrix()),
                show(y.as_matrix())
            )
        };
        let run = || -> Result<(f64, f64)> {
            let h = solve_general_lyapunov(&p0, &y, alpha(al))?;
            let fwd = lyapunov_forward(&p0, &h, al)?;
            let res = frobenius(&(fwd.as_matrix() - y.as_matrix()));
            let h2 = solve_general_lyapunov(&p0, &y, alpha(0.5))?;
            let lyap = h2.as_matrix() * p0.as_matrix() + p0.as_matrix() * h2.as_matrix();
            let res2 = frobenius(&(lyap - y.as_matrix()));
            Ok((res, res2))
        };
        match run() {
            Ok((res, res2)) => {
                let ny = y.frobenius_norm();
                t.within(res / ny, tol.lyapunov_residual_rel, witness);
                t.within(res2 / ny, tol.lyapunov_half_rel, witness);
            }
            Err(e) => t.error(e, witness),
        }
    }
    t.finish()
}

fn suite_geodesic(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> SuiteOutcome {
    let mut t = Tracker::new("geodesic-length");
    for k in 0..trials.min(10) {
        let n = rng.random_range(2..=5);
        let al = [0.25, 0.5, 1.0][k % 3];
        let a = sample::random_spd(rng, n);
        let b = sample::random_spd(rng, n);
        let witness = || {
            format!(
                "alpha={al} A={} B={}",
                show(a.as_matrix()),
                show(b.as_matrix())
            )
        };
        let run = || -> Result<(f64, f64, f64, f64)> {
            let curve = GeodesicCurve::new(a.clone(), b.clone(), al)?;
            let e0 = frobenius(&(curve.eval(0.0)?.as_matrix() - a.as_matrix()))
                / frobenius(a.as_matrix());
            let e1 = frobenius(&(curve.eval(1.0)?.as_matrix() - b.as_matrix()))
                / frobenius(b.as_matrix());
            let len = geodesic_length_numeric(&curve, 1000)?;
            let d = alpha_procrustes(&a, &b, alpha(al))?.value;
            Ok((e0, e1, len, d))
        };
        match run() {
            Ok((e0, e1, len, d)) => {
                t.within(e0.max(e1), tol.geodesic_endpoint_rel, witness);
                t.within(rel(len, d), tol.geodesic_length_rel, witness);
            }
            Err(e) => t.error(e, witness),
        }
    }
    t.finish()
}

fn suite_gamma_limit(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> SuiteOutcome {
    let mut t = Tracker::new("gamma-to-zero");
    for k in 0..trials.min(30) {
        let n = rng.random_range(2..=6);
        let al = [0.5, 0.75, 1.0][k % 3];
        let a = sample::random_psd_rank(rng, n, n.div_ceil(2));
        let b = sample::random_psd_rank(rng, n, n.div_ceil(2));
        let witness = || {
            format!(
                "alpha={al} A={} B={}",
                show(a.as_matrix()),
                show(b.as_matrix())
            )
        };
        match (
            alpha_procrustes_regularized(&a, &b, 1e-7, alpha(al)),
            alpha_procrustes(&a, &b, alpha(al)),
        ) {
            (Ok(r), Ok(d)) => t.within(rel(r.value, d.value), tol.gamma_limit_rel, witness),
            (Err(e), _) | (_, Err(e)) => t.error(e, witness),
        }
    }
    t.finish()
}

fn suite_rkhs_reduction(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> SuiteOutcome {
    let mut t = Tracker::new("rkhs-feature-reduction");
    let euclid = MeanMetricSpec::Euclidean;
    for k in 0..trials.min(10) {
        let (kernel, dim) = if k % 2 == 0 {
            (KernelSpec::Linear, 5)
        } else {
            (
                KernelSpec::Polynomial {
                    degree: 2,
                    offset: 1.0,
                },
                2,
            )
        };
        let m = rng.random_range(8..=15);
        let x = sample::random_dataset(rng, m, dim, 0.0);
        let y = sample::random_dataset(rng, m, dim, 0.5);
        let al = [0.5, 0.75, 1.2, -0.5][k % 4];
        let gamma = 0.05;
        let witness = || {
            format!(
                "kernel={kernel} alpha={al} X={} Y={}",
                show(x.points()),
                show(y.points())
            )
        };
        let run = || -> Result<Vec<(f64, f64)>> {
            let (mx, cx) = explicit_feature_covariance(&x, &kernel)?;
            let (my, cy) = explicit_feature_covariance(&y, &kernel)?;
            let gx = GaussianMeasure::new(mx, cx.clone())?;
            let gy = GaussianMeasure::new(my, cy.clone())?;
            Ok(vec![
                (
                    rkhs_alpha_distance(&x, &y, &kernel, al, gamma)?,
                    alpha_procrustes_regularized(&cx, &cy, gamma, alpha(al))?.value,
                ),
                (
                    rkhs_gaussian_distance(&x, &y, &kernel, alpha(al), gamma)?.distance,
                    gaussian_alpha_distance_regularized(&gx, &gy, alpha(al), gamma, &euclid)?,
                ),
                (
                    rkhs_wasserstein(&x, &y, &kernel)?.distance,
                    crate::gaussian::wasserstein_gaussian(&gx, &gy)?,
                ),
            ])
        };
        match run() {
            Ok(pairs) => {
                for (got, want) in pairs {
                    t.within(rel(got, want), tol.kernel_reduction_rel, witness);
                }
            }
            Err(e) => t.error(e, witness),
        }
    }
    t.finish()
}
