//! `alpha-proc`: command-line access to the Alpha Procrustes distances.
//!
//! Exit codes: 0 success, 2 usage or parse errors, 3 domain errors, 4 complex
//! spectrum, 5 failed validation. Results go to stdout (or `--output`),
//! diagnostics to stderr.

pub mod error;
pub mod input;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use procrustes_core::validate::{run_validation, Tolerances, ValidationConfig};
use procrustes_core::{
    alpha_procrustes, alpha_procrustes_regularized, bures_wasserstein, gaussian_alpha_distance,
    gaussian_alpha_distance_regularized, geodesic_length_numeric, log_euclidean, power_euclidean,
    rkhs_gaussian_distance, AlphaParam, DistanceResult, FormulaPath, GaussianMeasure,
    GeodesicCurve, KernelSpec, MeanMetricSpec, SpdMatrix,
};

use error::{exit, CliError, CliResult};
use output::{
    alpha_json, alpha_text, emit, fmt12, json_document, matrix_csv, matrix_json, num, Format,
};

/// Environment variable capping the worker threads of parallel sections.
pub const THREADS_ENV: &str = "ALPHA_PROC_THREADS";

/// Steps of the numeric length quadrature behind `geodesic --report-length`.
pub const LENGTH_STEPS: usize = 2000;

#[derive(Debug, Parser)]
#[command(
    name = "alpha-proc",
    version,
    about = "Alpha Procrustes distances between SPD matrices, Gaussians and RKHS covariance operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance between two matrices read from CSV files.
    Dist(DistArgs),
    /// Alpha Procrustes distance over a grid of alpha values.
    Sweep(SweepArgs),
    /// Points along the geodesic between two matrices.
    Geodesic(GeodesicArgs),
    /// Distance between two Gaussian measures.
    GaussDist(GaussArgs),
    /// Distance between the RKHS Gaussian measures of two datasets.
    RkhsDist(RkhsArgs),
    /// Randomized property suites.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    AlphaProcrustes,
    BuresWasserstein,
    LogEuclidean,
    PowerEuclidean,
}

impl Metric {
    fn name(self) -> &'static str {
        match self {
            Metric::AlphaProcrustes => "alpha-procrustes",
            Metric::BuresWasserstein => "bures-wasserstein",
            Metric::LogEuclidean => "log-euclidean",
            Metric::PowerEuclidean => "power-euclidean",
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write results here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long, value_enum, default_value = "alpha-procrustes")]
    pub metric: Metric,
    /// A number or `log-limit`.
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    pub alpha: String,
    /// Regularization `γ > 0` (alpha-procrustes only); 0 disables it.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Explicit values, e.g. `0.25,0.5,log-limit`.
    #[arg(
        long,
        conflicts_with = "alpha_range",
        required_unless_present = "alpha_range",
        allow_hyphen_values = true
    )]
    pub alphas: Option<String>,
    /// `lo:hi:steps`, evenly spaced and inclusive.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_range: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Number of intervals; `k + 1` points are emitted.
    #[arg(long, default_value_t = 4)]
    pub t_steps: usize,
    /// Also report the numeric length and the closed-form distance.
    #[arg(long)]
    pub report_length: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GaussArgs {
    #[arg(long)]
    pub mean1: PathBuf,
    #[arg(long)]
    pub cov1: PathBuf,
    #[arg(long)]
    pub mean2: PathBuf,
    #[arg(long)]
    pub cov2: PathBuf,
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Positive weights for a weighted Euclidean mean distance.
    #[arg(long)]
    pub weights: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RkhsArgs {
    pub x: PathBuf,
    pub y: PathBuf,
    /// `linear`, `poly:d=2,c=1` or `rbf:sigma=0.5`.
    #[arg(long, default_value = "linear")]
    pub kernel: String,
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    pub alpha: String,
    /// 0 selects the unregularized Gram form (alpha >= 1/2).
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Dataset files start with a header line.
    #[arg(long)]
    pub header: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = ValidationConfig::default().seed)]
    pub seed: u64,
    #[arg(long, default_value_t = ValidationConfig::default().trials)]
    pub trials: usize,
    /// Multiplies every tolerance; for exercising the failure path.
    #[arg(long, default_value_t = 1.0, hide = true)]
    pub tol_scale: f64,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                exit::USAGE
            } else {
                let _ = write!(stdout, "{}", e.render());
                exit::OK
            };
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(stderr, "error: {e}");
        return e.code;
    }
    match dispatch(&cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::usage(format!(
            "{THREADS_ENV} must be a positive integer, got '{raw}'"
        ))
    })?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn dispatch(cmd: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        Command::Dist(a) => run_dist(a, stdout),
        Command::Sweep(a) => run_sweep(a, stdout),
        Command::Geodesic(a) => run_geodesic(a, stdout),
        Command::GaussDist(a) => run_gauss(a, stdout),
        Command::RkhsDist(a) => run_rkhs(a, stdout),
        Command::Validate(a) => run_validate(a, stdout, stderr),
    }
}

fn parse_alpha(s: &str) -> CliResult<AlphaParam> {
    s.parse::<AlphaParam>()
        .map_err(|e| CliError::usage(e.to_string()))
}

fn check_gamma(gamma: f64) -> CliResult<()> {
    if gamma.is_finite() && gamma >= 0.0 {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "gamma must be finite and >= 0, got {gamma}"
        )))
    }
}

fn path_name(p: &FormulaPath) -> &'static str {
    match p {
        FormulaPath::General => "general",
        FormulaPath::LogLimit => "log-limit",
        FormulaPath::Commuting => "commuting",
    }
}

fn distance_for(
    metric: Metric,
    a: &SpdMatrix,
    b: &SpdMatrix,
    alpha: AlphaParam,
    gamma: f64,
) -> CliResult<DistanceResult> {
    if gamma > 0.0 && metric != Metric::AlphaProcrustes {
        return Err(CliError::usage(
            "--gamma applies only to the alpha-procrustes metric",
        ));
    }
    let r = match metric {
        Metric::AlphaProcrustes if gamma > 0.0 => alpha_procrustes_regularized(a, b, gamma, alpha)?,
        Metric::AlphaProcrustes => alpha_procrustes(a, b, alpha)?,
        Metric::BuresWasserstein => bures_wasserstein(a, b)?,
        Metric::LogEuclidean => log_euclidean(a, b)?,
        Metric::PowerEuclidean => {
            if alpha.is_log_limit() {
                return Err(CliError::usage("power-euclidean needs a nonzero alpha"));
            }
            power_euclidean(a, b, alpha.value())?
        }
    };
    Ok(r)
}

pub fn run_dist(args: &DistArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let alpha = parse_alpha(&args.alpha)?;
    check_gamma(args.gamma)?;
    let a = input::read_spd(&args.a)?;
    let b = input::read_spd(&args.b)?;
    let r = distance_for(args.metric, &a, &b, alpha, args.gamma)?;
    let text = match args.out.format {
        Format::Json => {
            let mut m = Map::new();
            m.insert("metric".into(), json!(args.metric.name()));
            m.insert("alpha".into(), alpha_json(r.alpha));
            m.insert("gamma".into(), num(r.gamma));
            m.insert("distance".into(), num(r.value));
            m.insert("formula_path".into(), json!(path_name(&r.formula_path)));
            json_document(m)
        }
        Format::Csv => format!(
            "metric,alpha,gamma,distance\n{},{},{},{}\n",
            args.metric.name(),
            alpha_text(r.alpha),
            fmt12(r.gamma),
            fmt12(r.value)
        ),
    };
    emit(&text, args.out.output.as_deref(), stdout)?;
    Ok(exit::OK)
}

/// Alpha grid of a sweep. Grid points in the logarithmic-limit band are
/// replaced by a single `log-limit` entry at the end.
pub fn sweep_alphas(args: &SweepArgs) -> CliResult<Vec<AlphaParam>> {
    let alphas = if let Some(list) = &args.alphas {
        list.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(parse_alpha)
            .collect::<CliResult<Vec<_>>>()?
    } else {
        let spec = args.alpha_range.as_deref().unwrap_or_default();
        let parts: Vec<&str> = spec.split(':').collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(CliError::usage(format!(
                "--alpha-range expects lo:hi:steps, got '{spec}'"
            )));
        };
        let bad = || CliError::usage(format!("--alpha-range expects lo:hi:steps, got '{spec}'"));
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let steps: usize = steps.trim().parse().map_err(|_| bad())?;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(bad());
        }
        let grid: Vec<f64> = match steps {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..steps)
                .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
                .collect(),
        };
        let mut out: Vec<AlphaParam> = grid
            .into_iter()
            .map(|v| AlphaParam::new(v).map_err(CliError::from))
            .collect::<CliResult<Vec<_>>>()?
            .into_iter()
            .filter(|a| !a.is_log_limit())
            .collect();
        if steps > 0 && lo <= 0.0 && 0.0 <= hi {
            out.push(AlphaParam::log_limit());
        }
        out
    };
    if alphas.is_empty() {
        return Err(CliError::usage("empty alpha list"));
    }
    Ok(alphas)
}

pub fn run_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    check_gamma(args.gamma)?;
    let alphas = sweep_alphas(args)?;
    let a = input::read_spd(&args.a)?;
    let b = input::read_spd(&args.b)?;
    let rows = alphas
        .iter()
        .map(|&al| {
            distance_for(Metric::AlphaProcrustes, &a, &b, al, args.gamma).map(|r| (al, r.value))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let text = match args.format {
        Format::Csv => {
            let mut s = String::from("alpha,distance\n");
            for (al, d) in &rows {
                s.push_str(&format!("{},{}\n", alpha_text(*al), fmt12(*d)));
            }
            s
        }
        Format::Json => {
            let mut m = Map::new();
            m.insert("gamma".into(), num(args.gamma));
            m.insert(
                "rows".into(),
                Value::Array(
                    rows.iter()
                        .map(|(al, d)| json!({"alpha": alpha_json(*al), "distance": num(*d)}))
                        .collect(),
                ),
            );
            json_document(m)
        }
    };
    emit(&text, args.output.as_deref(), stdout)?;
    Ok(exit::OK)
}

pub fn run_geodesic(args: &GeodesicArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    if args.t_steps == 0 {
        return Err(CliError::usage("--t-steps must be at least 1"));
    }
    let alpha = AlphaParam::new(args.alpha).map_err(CliError::from)?;
    if alpha.is_log_limit() {
        return Err(CliError::usage("geodesics need a nonzero alpha"));
    }
    let a = input::read_spd(&args.a)?;
    let b = input::read_spd(&args.b)?;
    let curve = GeodesicCurve::new(a.clone(), b.clone(), args.alpha)?;
    let ts: Vec<f64> = (0..=args.t_steps)
        .map(|i| i as f64 / args.t_steps as f64)
        .collect();
    let points = ts
        .iter()
        .map(|&t| curve.eval(t).map(|p| p.as_matrix().clone()))
        .collect::<procrustes_core::Result<Vec<_>>>()?;
    let length = if args.report_length {
        let numeric = geodesic_length_numeric(&curve, LENGTH_STEPS)?;
        let closed = alpha_procrustes(&a, &b, alpha)?.value;
        Some((numeric, closed))
    } else {
        None
    };
    let text = match args.out.format {
        Format::Json => {
            let mut m = Map::new();
            m.insert("alpha".into(), alpha_json(alpha));
            m.insert(
                "t".into(),
                Value::Array(ts.iter().map(|&t| num(t)).collect()),
            );
            m.insert(
                "points".into(),
                Value::Array(points.iter().map(matrix_json).collect()),
            );
            if let Some((numeric, closed)) = length {
                m.insert("length".into(), num(numeric));
                m.insert("distance".into(), num(closed));
            }
            json_document(m)
        }
        Format::Csv => {
            let mut s = String::new();
            for (t, p) in ts.iter().zip(&points) {
                s.push_str(&format!("# t={}\n", fmt12(*t)));
                s.push_str(&matrix_csv(p));
            }
            if let Some((numeric, closed)) = length {
                s.push_str(&format!(
                    "# length={}\n# distance={}\n",
                    fmt12(numeric),
                    fmt12(closed)
                ));
            }
            s
        }
    };
    emit(&text, args.out.output.as_deref(), stdout)?;
    Ok(exit::OK)
}

pub fn run_gauss(args: &GaussArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let alpha = parse_alpha(&args.alpha)?;
    check_gamma(args.gamma)?;
    let metric = match &args.weights {
        Some(w) => MeanMetricSpec::weighted(input::parse_list(w)?)?,
        None => MeanMetricSpec::Euclidean,
    };
    let g1 = GaussianMeasure::new(
        input::read_vector(&args.mean1)?,
        input::read_spd(&args.cov1)?,
    )?;
    let g2 = GaussianMeasure::new(
        input::read_vector(&args.mean2)?,
        input::read_spd(&args.cov2)?,
    )?;
    let d = if args.gamma > 0.0 {
        gaussian_alpha_distance_regularized(&g1, &g2, alpha, args.gamma, &metric)?
    } else {
        gaussian_alpha_distance(&g1, &g2, alpha, &metric)?
    };
    let metric_name = match metric {
        MeanMetricSpec::Euclidean => "euclidean",
        MeanMetricSpec::WeightedEuclidean(_) => "weighted-euclidean",
    };
    let text = match args.out.format {
        Format::Json => {
            let mut m = Map::new();
            m.insert("alpha".into(), alpha_json(alpha));
            m.insert("gamma".into(), num(args.gamma));
            m.insert("mean_metric".into(), json!(metric_name));
            m.insert("distance".into(), num(d));
            json_document(m)
        }
        Format::Csv => format!(
            "alpha,gamma,mean_metric,distance\n{},{},{},{}\n",
            alpha_text(alpha),
            fmt12(args.gamma),
            metric_name,
            fmt12(d)
        ),
    };
    emit(&text, args.out.output.as_deref(), stdout)?;
    Ok(exit::OK)
}

pub fn run_rkhs(args: &RkhsArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let alpha = parse_alpha(&args.alpha)?;
    check_gamma(args.gamma)?;
    let kernel: KernelSpec = args
        .kernel
        .parse()
        .map_err(|e: procrustes_core::Error| CliError::usage(e.to_string()))?;
    let x = input::read_dataset(&args.x, args.header)?;
    let y = input::read_dataset(&args.y, args.header)?;
    let r = rkhs_gaussian_distance(&x, &y, &kernel, alpha, args.gamma)?;
    let text = match args.out.format {
        Format::Json => {
            let mut m = Map::new();
            m.insert("kernel".into(), json!(kernel.to_string()));
            m.insert("alpha".into(), alpha_json(alpha));
            m.insert("gamma".into(), num(args.gamma));
            m.insert("mean_term".into(), num(r.mean_term));
            m.insert("covariance_term".into(), num(r.covariance_term));
            m.insert("distance".into(), num(r.distance));
            json_document(m)
        }
        Format::Csv => format!(
            "kernel,alpha,gamma,mean_term,covariance_term,distance\n\"{}\",{},{},{},{},{}\n",
            kernel,
            alpha_text(alpha),
            fmt12(args.gamma),
            fmt12(r.mean_term),
            fmt12(r.covariance_term),
            fmt12(r.distance)
        ),
    };
    emit(&text, args.out.output.as_deref(), stdout)?;
    Ok(exit::OK)
}

pub fn run_validate(
    args: &ValidateArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<i32> {
    if args.trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    if !(args.tol_scale.is_finite() && args.tol_scale >= 0.0) {
        return Err(CliError::usage("--tol-scale must be finite and >= 0"));
    }
    let cfg = ValidationConfig {
        seed: args.seed,
        trials: args.trials,
        tolerances: Tolerances::default().scaled(args.tol_scale),
    };
    let report = run_validation(&cfg)?;
    stdout.write_all(report.render().as_bytes())?;
    if report.all_passed() {
        Ok(exit::OK)
    } else {
        for s in report.suites.iter().filter(|s| !s.passed()) {
            writeln!(
                stderr,
                "validation failed: {} ({} of {} checks)",
                s.name, s.failures, s.checks
            )?;
        }
        Ok(exit::VALIDATION_FAILED)
    }
}
