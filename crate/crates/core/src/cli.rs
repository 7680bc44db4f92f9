//! Command-line front end: parses flags, validates them, runs one command
//! and writes a CSV table (plus an optional SVG plot).
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O failure, 3 numerical domain
//! error, 4 resource budget exceeded.

use std::ffi::OsString;
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::euclid::{self, MultiIndex};
use crate::exec::Execution;
use crate::experiments::{self, GrowthFit};
use crate::output::{format_value, write_svg, PlotSpec, Table};
use crate::profile::linear_grid;
use crate::specfun::universal_profile;
use crate::sphere::SphereGeometry;
use crate::torus::TorusGeometry;

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "SPECTRAL_FN_THREADS";

#[derive(Debug, Parser)]
#[command(name = "spectral-fn", version, about = "Spectral function kernels on spheres, flat tori and Euclidean space")]
pub struct RunConfig {
    /// Worker threads; overrides SPECTRAL_FN_THREADS. Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional SVG line plot.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// E_n(φ) on S^{d-1}, or its rescaled version with --rescaled.
    SphereProfile {
        #[arg(long, default_value_t = 3)]
        d: u32,
        #[arg(long, default_value_t = 100)]
        n: u64,
        /// Largest geodesic angle (before rescaling).
        #[arg(long, default_value_t = FRAC_PI_8)]
        phi_max: f64,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        /// Divide by the value at φ = 0.
        #[arg(long)]
        normalize: bool,
        /// Sample r_n^{-(d-1)} E_n(φ/r_n) on [0, phi_max·r_n].
        #[arg(long)]
        rescaled: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sup error of the rescaled sphere profile against K_{d-1}, per level.
    SphereConverge {
        #[arg(long, default_value_t = 3)]
        d: u32,
        #[arg(long, value_delimiter = ',', default_values_t = [50u64, 100, 200, 400, 800])]
        levels: Vec<u64>,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value_t = experiments::SPHERE_GRID_START)]
        phi_min: f64,
        #[arg(long, default_value_t = FRAC_PI_4)]
        phi_max: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rescaled torus profile at one level, or its error trend with --levels.
    TorusProfile {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2.0 * PI)]
        side: f64,
        #[arg(long, default_value_t = 1e4)]
        level: f64,
        /// Run the convergence sweep over these levels instead.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
        #[arg(long, default_value_t = 8.0)]
        s_max: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Unit direction, comma separated; defaults to the first axis.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direction: Option<Vec<f64>>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ball quadrature of the flat kernel against the Bessel closed form.
    EuclidCheck {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 50)]
        radii: usize,
        #[arg(long, default_value_t = 10.0)]
        r_max: f64,
        /// Cells per axis (even); a per-dimension default when omitted.
        #[arg(long)]
        cells: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Diagonal Taylor coefficients C_{α,β} with their ball-moment oracle.
    DiagCoeffs {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        max_order: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Factorial growth fit of the rescaled diagonal derivatives.
    Growth {
        #[arg(long, default_value_t = 3)]
        d: u32,
        #[arg(long, default_value_t = 100)]
        n: u64,
        #[arg(long, default_value_t = 12)]
        max_order: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Hilb approximation error at θ = φ/a_n across levels.
    Hilb {
        #[arg(long, default_value_t = 3)]
        d: u32,
        #[arg(long, value_delimiter = ',', default_values_t = [50u64, 100, 200, 400, 800, 1600])]
        levels: Vec<u64>,
        #[arg(long, default_value_t = 0.1)]
        phi: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Run(Error::Io(_)) => 2,
            CliError::Run(Error::Resource { .. }) => 4,
            CliError::Run(_) => 3,
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

/// A finished command: its table, what to plot, and summary lines for stderr.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub plot: PlotSpec,
    pub summary: Vec<String>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Validates, computes and writes the outputs of one configuration.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let threads = resolve_threads(config.threads, std::env::var(THREADS_ENV).ok())?;
    validate(&config.command)?;
    let exec = if threads == Some(1) { Execution::Sequential } else { Execution::Parallel };
    let outcome = with_threads(threads, || execute(&config.command, exec))??;
    let output = output_args(&config.command);
    match &output.out {
        Some(path) => outcome.table.write_csv(std::fs::File::create(path).map_err(Error::from)?)?,
        None => outcome.table.write_csv(std::io::stdout().lock())?,
    }
    if let Some(svg) = &output.svg {
        write_svg(svg, &outcome.table, &outcome.plot)?;
    }
    for line in &outcome.summary {
        eprintln!("{line}");
    }
    Ok(())
}

/// The flag wins over the environment; `None` leaves the pool size to rayon.
pub fn resolve_threads(flag: Option<usize>, env: Option<String>) -> Result<Option<usize>, CliError> {
    let n = match (flag, env) {
        (Some(n), _) => n,
        (None, Some(s)) => match s.trim().parse::<usize>() {
            Ok(n) => n,
            Err(_) => return usage(format!("{THREADS_ENV} must be a positive integer, got {s:?}")),
        },
        (None, None) => return Ok(None),
    };
    if n == 0 {
        return usage("thread count must be >= 1");
    }
    Ok(Some(n))
}

#[cfg(feature = "parallel")]
fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<R: Send>(_threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    Ok(f())
}

fn output_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::SphereProfile { output, .. }
        | Command::SphereConverge { output, .. }
        | Command::TorusProfile { output, .. }
        | Command::EuclidCheck { output, .. }
        | Command::DiagCoeffs { output, .. }
        | Command::Growth { output, .. }
        | Command::Hilb { output, .. } => output,
    }
}

fn check_finite_positive(name: &str, v: f64) -> Result<(), CliError> {
    if !(v > 0.0) || !v.is_finite() {
        return usage(format!("--{name} must be finite and > 0, got {v}"));
    }
    Ok(())
}

fn check_sphere_dim(d: u32) -> Result<(), CliError> {
    if d < 3 {
        return usage(format!("--d must be >= 3, got {d}"));
    }
    Ok(())
}

fn check_samples(samples: usize) -> Result<(), CliError> {
    if samples < 2 {
        return usage(format!("--samples must be >= 2, got {samples}"));
    }
    Ok(())
}

fn check_levels<T: PartialOrd + Copy + std::fmt::Display>(levels: &[T], lowest: T) -> Result<(), CliError> {
    if levels.len() < 2 {
        return usage("--levels needs at least 2 values");
    }
    if levels[0] < lowest || levels.windows(2).any(|w| !(w[0] < w[1])) {
        return usage(format!("--levels must be strictly increasing and >= {lowest}"));
    }
    Ok(())
}

fn check_torus_dim(m: usize) -> Result<(), CliError> {
    if !(1..=3).contains(&m) {
        return usage(format!("--m must be 1, 2 or 3, got {m}"));
    }
    Ok(())
}

/// Range checks that need no computation.
pub fn validate(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::SphereProfile { d, n, phi_max, samples, rescaled, .. } => {
            check_sphere_dim(*d)?;
            check_samples(*samples)?;
            check_finite_positive("phi-max", *phi_max)?;
            if *phi_max > PI {
                return usage("--phi-max must be <= π");
            }
            if *rescaled && *n == 0 {
                return usage("--rescaled needs --n >= 1");
            }
        }
        Command::SphereConverge { d, levels, samples, phi_min, phi_max, .. } => {
            check_sphere_dim(*d)?;
            check_levels(levels, 1)?;
            check_samples(*samples)?;
            if !(experiments::SPHERE_GRID_START <= *phi_min && phi_min < phi_max && *phi_max <= FRAC_PI_4) {
                return usage(format!(
                    "need {} <= --phi-min < --phi-max <= π/4",
                    experiments::SPHERE_GRID_START
                ));
            }
        }
        Command::TorusProfile { m, side, level, levels, s_max, samples, direction, .. } => {
            check_torus_dim(*m)?;
            check_finite_positive("side", *side)?;
            check_finite_positive("s-max", *s_max)?;
            check_samples(*samples)?;
            match levels {
                Some(ls) => check_levels(ls, f64::MIN_POSITIVE)?,
                None => check_finite_positive("level", *level)?,
            }
            if let Some(dir) = direction {
                if dir.len() != *m {
                    return usage(format!("--direction needs {m} components, got {}", dir.len()));
                }
            }
        }
        Command::EuclidCheck { m, radii, r_max, cells, .. } => {
            check_torus_dim(*m)?;
            if *radii < 1 {
                return usage("--radii must be >= 1");
            }
            if !(*r_max >= 0.0) || !r_max.is_finite() {
                return usage("--r-max must be finite and >= 0");
            }
            if let Some(c) = cells {
                if *c < 2 || c % 2 != 0 {
                    return usage(format!("--cells must be even and >= 2, got {c}"));
                }
            }
        }
        Command::DiagCoeffs { m, max_order, .. } => {
            check_torus_dim(*m)?;
            if *max_order > 12 {
                return usage(format!("--max-order must be <= 12, got {max_order}"));
            }
        }
        Command::Growth { d, n, max_order, .. } => {
            check_sphere_dim(*d)?;
            if *n == 0 {
                return usage("--n must be >= 1");
            }
            if *max_order > experiments::MAX_DIAGONAL_ORDER || max_order % 2 != 0 {
                return usage(format!("--max-order must be even and <= {}", experiments::MAX_DIAGONAL_ORDER));
            }
        }
        Command::Hilb { d, levels, phi, .. } => {
            check_sphere_dim(*d)?;
            check_levels(levels, 1)?;
            check_finite_positive("phi", *phi)?;
        }
    }
    Ok(())
}

fn plot(title: &str, x: &str, y: &str, columns: (usize, usize), log_log: bool) -> PlotSpec {
    PlotSpec {
        title: title.into(),
        x_label: x.into(),
        y_label: y.into(),
        x_column: columns.0,
        y_column: columns.1,
        log_log,
    }
}

fn fit_summary(levels: &[f64], errors: &[f64]) -> String {
    match experiments::log_log_fit(levels, errors) {
        Ok((slope, intercept)) => format!("fitted_slope: {}\nfitted_intercept: {}", format_value(slope), format_value(intercept)),
        Err(e) => format!("fitted_slope: n/a ({e})"),
    }
}

/// Runs a validated command.
pub fn execute(cmd: &Command, exec: Execution) -> Result<Outcome, Error> {
    match cmd {
        Command::SphereProfile { d, n, phi_max, samples, normalize, rescaled, .. } => {
            let geom = SphereGeometry::new(*d)?;
            let (profile, at_zero) = if *rescaled {
                let r = geom.rescaling_radius(*n)?;
                let grid = linear_grid(0.0, phi_max * r, *samples);
                (geom.rescaled_profile(*n, &grid, exec)?, geom.rescaled_value(*n, 0.0)?)
            } else {
                let grid = linear_grid(0.0, *phi_max, *samples);
                (geom.profile(*n, &grid, exec)?, geom.spectral_cd(*n, 0.0)?)
            };
            let profile = if *normalize { profile.normalized_by(at_zero)? } else { profile };
            let mut table = Table::new(["phi", "value"]);
            for (phi, v) in profile.iter() {
                table.push_values(&[phi, v]);
            }
            let title = match (*rescaled, *normalize) {
                (false, false) => format!("E_{n}(φ), d = {d}"),
                (false, true) => format!("E_{n}(φ) / E_{n}(0), d = {d}"),
                (true, false) => format!("rescaled E_{n}, d = {d}"),
                (true, true) => format!("rescaled E_{n}, normalized, d = {d}"),
            };
            let x = if *rescaled { "rescaled distance" } else { "φ" };
            Ok(Outcome { table, plot: plot(&title, x, "value", (0, 1), false), summary: Vec::new() })
        }
        Command::SphereConverge { d, levels, samples, phi_min, phi_max, .. } => {
            let geom = SphereGeometry::new(*d)?;
            let grid = linear_grid(*phi_min, *phi_max, *samples);
            let report = experiments::converge_sphere(geom, levels, &grid, exec)?;
            let mut table = Table::new(["level", "sup_error"]);
            for (l, e) in report.levels.iter().zip(&report.sup_errors) {
                table.push_values(&[*l, *e]);
            }
            let summary = vec![
                format!("fitted_slope: {}", format_value(report.fitted_slope)),
                format!("fitted_intercept: {}", format_value(report.fitted_intercept)),
                format!("reduction: {}", format_value(report.reduction())),
            ];
            let title = format!("sphere d = {d}: sup error vs n");
            Ok(Outcome { table, plot: plot(&title, "ln n", "ln sup error", (0, 1), true), summary })
        }
        Command::TorusProfile { m, side, level, levels, s_max, samples, direction, .. } => {
            let geom = TorusGeometry::new(*m, *side)?;
            let dir = direction.clone().unwrap_or_else(|| {
                let mut e = vec![0.0; *m];
                e[0] = 1.0;
                e
            });
            let grid = linear_grid(0.0, *s_max, *samples);
            match levels {
                None => {
                    let profile = geom.rescaled_profile(*level, &dir, &grid, exec)?;
                    let mut table = Table::new(["s", "value", "limit"]);
                    for (s, v) in profile.iter() {
                        table.push_values(&[s, v, universal_profile(*m as u32, s)?]);
                    }
                    let title = format!("rescaled torus kernel, m = {m}, L = {}", format_value(*level));
                    Ok(Outcome { table, plot: plot(&title, "s", "value", (0, 1), false), summary: Vec::new() })
                }
                Some(levels) => {
                    let report = experiments::converge_torus(geom, levels, &dir, &grid, exec)?;
                    let mut table = Table::new(["level", "sup_error"]);
                    for (l, e) in report.levels.iter().zip(&report.sup_errors) {
                        table.push_values(&[*l, *e]);
                    }
                    let summary = vec![
                        format!("fitted_slope: {}", format_value(report.fitted_slope)),
                        format!("reduction: {}", format_value(report.reduction())),
                    ];
                    let title = format!("torus m = {m}: sup error vs L");
                    Ok(Outcome { table, plot: plot(&title, "ln L", "ln sup error", (0, 1), true), summary })
                }
            }
        }
        Command::EuclidCheck { m, radii, r_max, cells, .. } => {
            let cells = match cells {
                Some(c) => *c,
                None => euclid::default_cells(*m)?,
            };
            let mut table = Table::new(["r", "quadrature", "profile", "abs_error"]);
            let mut worst = 0.0_f64;
            for r in linear_grid(0.0, *r_max, *radii) {
                let mut u = vec![0.0; *m];
                u[0] = r;
                let q = euclid::ball_quadrature_on_grid(*m, &u, cells, exec)?;
                let k = universal_profile(*m as u32, r)?;
                worst = worst.max((q - k).abs());
                table.push_values(&[r, q, k, (q - k).abs()]);
            }
            let summary = vec![format!("max_abs_error: {}", format_value(worst))];
            let title = format!("ball quadrature, m = {m}, {cells} cells per axis");
            Ok(Outcome { table, plot: plot(&title, "r", "quadrature", (0, 1), false), summary })
        }
        Command::DiagCoeffs { m, max_order, .. } => {
            let indices = MultiIndex::all_up_to(*m, *max_order);
            let mut table = Table::new(["alpha", "beta", "value", "oracle"]);
            for a in &indices {
                for b in &indices {
                    if a.order() + b.order() > *max_order {
                        continue;
                    }
                    let v = euclid::diagonal_coefficient(*m, a, b)?;
                    let o = euclid::diagonal_coefficient_from_moment(*m, a, b)?;
                    table.push(vec![a.to_string(), b.to_string(), format_value(v), format_value(o)]);
                }
            }
            let title = format!("diagonal coefficients, m = {m}");
            Ok(Outcome { table, plot: plot(&title, "row", "value", (2, 3), false), summary: Vec::new() })
        }
        Command::Growth { d, n, max_order, .. } => {
            let geom = SphereGeometry::new(*d)?;
            let fit: GrowthFit = experiments::growth_fit(geom, *n, *max_order)?;
            let mut table = Table::new(["order", "magnitude", "bound"]);
            for (&j, &mag) in fit.orders.iter().zip(&fit.magnitudes) {
                table.push_values(&[j as f64, mag, fit.bound(j)]);
            }
            let summary = vec![
                format!("k_fit: {}", format_value(fit.k_fit)),
                format!("t_fit: {}", format_value(fit.t_fit)),
            ];
            let title = format!("radial derivatives at the diagonal, d = {d}, n = {n}");
            Ok(Outcome { table, plot: plot(&title, "order", "magnitude", (0, 1), false), summary })
        }
        Command::Hilb { d, levels, phi, .. } => {
            let geom = SphereGeometry::new(*d)?;
            let rows = exec.try_map(levels, |&n| {
                let theta = phi / geom.hilb_frequency(n);
                let exact = geom.legendre(n, theta.cos())?;
                let approx = experiments::hilb_approx(geom, n, theta)?;
                Ok::<_, Error>([n as f64, theta, exact, approx, (exact - approx).abs()])
            })?;
            let mut table = Table::new(["n", "theta", "exact", "approx", "abs_error"]);
            for row in &rows {
                table.push_values(row);
            }
            let ns: Vec<f64> = rows.iter().map(|r| r[0]).collect();
            let errs: Vec<f64> = rows.iter().map(|r| r[4]).collect();
            let summary = fit_summary(&ns, &errs).lines().map(String::from).collect();
            let title = format!("Hilb approximation error, d = {d}, φ = {phi}");
            Ok(Outcome { table, plot: plot(&title, "ln n", "ln error", (0, 4), true), summary })
        }
    }
}
