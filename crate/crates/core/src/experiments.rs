//! Numerical experiments built on the kernels: the Hilb approximation of
//! Legendre polynomials, convergence of rescaled profiles to the universal
//! profile, radial derivative limits at the diagonal and their factorial
//! growth.

use std::f64::consts::FRAC_PI_4;

use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::jet::MAX_JET_ORDER;
use crate::profile::check_grid;
use crate::specfun::{bessel_j, gamma_fn, universal_profile};
use crate::sphere::SphereGeometry;
use crate::torus::TorusGeometry;

/// Lower edge of the rescaled-distance grid used for sphere convergence runs.
pub const SPHERE_GRID_START: f64 = 1e-3;

/// Upper edge of that grid.
pub const SPHERE_GRID_END: f64 = FRAC_PI_4;

/// Highest radial derivative order examined at the diagonal.
pub const MAX_DIAGONAL_ORDER: usize = 12;

const _: () = assert!(MAX_DIAGONAL_ORDER <= MAX_JET_ORDER);

/// Leading-term Hilb approximation of `P_{n,d}(cos θ)`:
/// `Γ(α+1) (θ/sin θ)^{1/2} (2/(a_n sin θ))^α J_α(a_n θ)` with α = (d−3)/2.
pub fn hilb_approx(geom: SphereGeometry, n: u64, theta: f64) -> Result<f64> {
    if n == 0 {
        return domain("Hilb approximation needs n >= 1");
    }
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
        return domain(format!("Hilb approximation needs θ in (0, π/2], got {theta}"));
    }
    let alpha = geom.jacobi_alpha();
    let a = geom.hilb_frequency(n);
    let sin = theta.sin();
    let envelope = (theta / sin).sqrt() * (2.0 / (a * sin)).powf(alpha.value());
    Ok(gamma_fn(alpha.value() + 1.0)? * envelope * bessel_j(alpha, a * theta)?)
}

/// Ordinary least-squares fit `y = slope·x + intercept`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 paired points, got {} and {}", xs.len(), ys.len())));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    if !slope.is_finite() {
        return Err(Error::Fit("non-finite slope".into()));
    }
    Ok((slope, my - slope * mx))
}

/// Log-log least-squares fit of `errors` against `levels`.
pub fn log_log_fit(levels: &[f64], errors: &[f64]) -> Result<(f64, f64)> {
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(Error::Fit(format!("log-log fit needs positive finite errors, got {e}")));
    }
    let xs: Vec<f64> = levels.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    least_squares(&xs, &ys)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub levels: Vec<f64>,
    pub sup_errors: Vec<f64>,
    pub fitted_slope: f64,
    pub fitted_intercept: f64,
}

impl ConvergenceReport {
    pub fn from_errors(levels: Vec<f64>, sup_errors: Vec<f64>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::Fit(format!("a rate needs at least 2 levels, got {}", levels.len())));
        }
        if levels.windows(2).any(|w| !(w[0] < w[1])) || !(levels[0] > 0.0) {
            return domain("levels must be positive and strictly increasing");
        }
        let (fitted_slope, fitted_intercept) = log_log_fit(&levels, &sup_errors)?;
        Ok(Self { levels, sup_errors, fitted_slope, fitted_intercept })
    }

    /// Error at the last level divided by the error at the first.
    pub fn reduction(&self) -> f64 {
        self.sup_errors[self.sup_errors.len() - 1] / self.sup_errors[0]
    }
}

fn check_level_count(count: usize) -> Result<()> {
    if count < 2 {
        return Err(Error::Fit(format!("a rate needs at least 2 levels, got {count}")));
    }
    Ok(())
}

/// Sup error of `Ē_n` against `K_{d−1}` on a grid inside `[δ, π/4]`, one task
/// per level.
pub fn converge_sphere(
    geom: SphereGeometry,
    levels: &[u64],
    grid: &[f64],
    exec: Execution,
) -> Result<ConvergenceReport> {
    check_level_count(levels.len())?;
    check_grid(grid)?;
    if grid.is_empty() {
        return domain("empty distance grid");
    }
    if grid[0] < SPHERE_GRID_START || grid[grid.len() - 1] > SPHERE_GRID_END {
        return domain(format!("grid must lie in [{SPHERE_GRID_START}, π/4]"));
    }
    let m = geom.dim();
    let errors = exec.try_map(levels, |&n| {
        geom.rescaled_profile(n, grid, Execution::Sequential)?
            .sup_distance(|s| universal_profile(m, s))
    })?;
    ConvergenceReport::from_errors(levels.iter().map(|&n| n as f64).collect(), errors)
}

/// Sup error of the rescaled torus profile along `direction` against `K_m`.
pub fn converge_torus(
    geom: TorusGeometry,
    levels: &[f64],
    direction: &[f64],
    grid: &[f64],
    exec: Execution,
) -> Result<ConvergenceReport> {
    check_level_count(levels.len())?;
    let m = geom.dim() as u32;
    let errors = exec.try_map(levels, |&level| {
        geom.rescaled_profile(level, direction, grid, exec)?
            .sup_distance(|s| universal_profile(m, s))
    })?;
    ConvergenceReport::from_errors(levels.to_vec(), errors)
}

/// `∂^j_φ Ē_n(0)` for j = 0..=max_order, read off a Taylor jet; odd orders
/// vanish exactly.
pub fn diagonal_derivatives(geom: SphereGeometry, n: u64, max_order: usize) -> Result<Vec<f64>> {
    if max_order > MAX_DIAGONAL_ORDER || !max_order.is_multiple_of(2) {
        return domain(format!("max order must be even and <= {MAX_DIAGONAL_ORDER}, got {max_order}"));
    }
    let r = geom.rescaling_radius(n)?;
    let jet = geom.spectral_jet(n, r, max_order)?;
    let norm = r.powi(geom.dim() as i32);
    Ok((0..=max_order).map(|j| jet.derivative(j) / norm).collect())
}

/// Smallest constants with `|∂^j Ē_n(0)| ≤ K T^j j!` over the sampled orders.
///
/// K is pinned by j = 0, then T is the least value satisfying every higher
/// order, so the bound is attained at j = 0 and at the maximizing order.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub orders: Vec<usize>,
    pub magnitudes: Vec<f64>,
    pub k_fit: f64,
    pub t_fit: f64,
}

impl GrowthFit {
    pub fn from_magnitudes(magnitudes: Vec<f64>) -> Result<Self> {
        if magnitudes.is_empty() || magnitudes.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
            return Err(Error::Fit("magnitudes must be finite, non-negative and non-empty".into()));
        }
        if magnitudes.iter().all(|&m| m == 0.0) {
            return Err(Error::Fit("all derivative magnitudes vanish; no growth constant exists".into()));
        }
        let normalized: Vec<f64> = magnitudes
            .iter()
            .enumerate()
            .map(|(j, m)| m / factorial(j))
            .collect();
        let (k_fit, t_fit) = if normalized[0] > 0.0 {
            let k = normalized[0];
            let t = normalized
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, a)| (a / k).powf(1.0 / j as f64))
                .fold(0.0_f64, f64::max);
            // only j = 0 is nonzero: any T works, 1 keeps it neutral
            (k, if t > 0.0 { t } else { 1.0 })
        } else {
            (normalized.iter().cloned().fold(0.0, f64::max), 1.0)
        };
        Ok(Self { orders: (0..magnitudes.len()).collect(), magnitudes, k_fit, t_fit })
    }

    /// `K T^j j!` at order j.
    pub fn bound(&self, j: usize) -> f64 {
        self.k_fit * self.t_fit.powi(j as i32) * factorial(j)
    }
}

pub fn growth_fit(geom: SphereGeometry, n: u64, max_order: usize) -> Result<GrowthFit> {
    let derivs = diagonal_derivatives(geom, n, max_order)?;
    GrowthFit::from_magnitudes(derivs.iter().map(|d| d.abs()).collect())
}

fn factorial(j: usize) -> f64 {
    (1..=j).map(|k| k as f64).product()
}
