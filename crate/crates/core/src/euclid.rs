//! Flat-space spectral kernel and its independent checks.
//!
//! On R^m the spectral projector onto frequencies `|ξ|² ≤ L` has kernel
//! `(2π)^{-m} ∫_{|ξ|² ≤ L} e^{i ξ·(x−y)} dξ = L^{m/2} K_m(√L |x−y|)`. The
//! Taylor coefficients of this kernel on the diagonal are ball moments,
//! which gives a second route to the closed-form diagonal coefficients.

use std::f64::consts::PI;
use std::fmt;

use crate::compensated::NeumaierSum;
use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::specfun::{double_factorial, gamma_pos, universal_profile};

/// Midpoint cells per axis used by [`ball_quadrature`] for m = 1, 2, 3.
pub const BALL_QUADRATURE_CELLS: [usize; 3] = [4096, 4096, 360];

/// A multi-index α ∈ N^m.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zeros(m: usize) -> Self {
        Self(vec![0; m])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// |α| = Σ α_i.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Every multi-index of length m with |α| ≤ max_order, graded by order
    /// and lexicographically descending within an order.
    pub fn all_up_to(m: usize, max_order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for order in 0..=max_order {
            let mut current = vec![0u32; m];
            fill(&mut current, 0, order, &mut out);
        }
        out
    }

    /// Parses `"2"` or `"1;0;3"`.
    pub fn parse(s: &str) -> Result<Self> {
        s.split(';')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Domain(format!("bad multi-index entry {p:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

fn fill(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if current.is_empty() {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for v in (0..=remaining).rev() {
        current[pos] = v;
        fill(current, pos + 1, remaining - v, out);
    }
    current[pos] = 0;
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// The flat-space spectral kernel at distance r: `L^{m/2} K_m(√L r)`.
pub fn flat_kernel(m: u32, level: f64, r: f64) -> Result<f64> {
    if !(level > 0.0) || !level.is_finite() {
        return domain(format!("spectral level must be finite and > 0, got {level}"));
    }
    if !(r >= 0.0) {
        return domain(format!("distance must be >= 0, got {r}"));
    }
    Ok(level.powf(m as f64 / 2.0) * universal_profile(m, level.sqrt() * r)?)
}

/// `(2π)^{-m} ∫_{|ξ| ≤ 1} cos(ξ·u) dξ` by midpoint quadrature on the
/// default grid ([`BALL_QUADRATURE_CELLS`]).
pub fn ball_quadrature(m: usize, u: &[f64]) -> Result<f64> {
    ball_quadrature_on_grid(m, u, default_cells(m)?, Execution::default())
}

/// Default cells per axis for dimension m.
pub fn default_cells(m: usize) -> Result<usize> {
    match m {
        1..=3 => Ok(BALL_QUADRATURE_CELLS[m - 1]),
        _ => Err(Error::UnsupportedDimension { dim: m, supported: "1, 2, 3" }),
    }
}

/// Midpoint quadrature on `cells^m` cubes covering [−1, 1]^m; a cell counts
/// when its center lies in the closed unit ball.
///
/// Cell centers are `k/cells` for odd integers |k| < cells, so membership is
/// an exact integer test. The innermost axis is summed through symmetric
/// prefix sums of `cos(ξ_m u_m)` (the sine part cancels over a symmetric
/// range), which evaluates exactly the same rule with one cosine per row.
pub fn ball_quadrature_on_grid(m: usize, u: &[f64], cells: usize, exec: Execution) -> Result<f64> {
    default_cells(m)?;
    if u.len() != m {
        return domain(format!("frequency vector has length {}, expected {m}", u.len()));
    }
    if cells == 0 || cells % 2 == 1 {
        return domain(format!("cells per axis must be even and positive, got {cells}"));
    }
    if u.iter().any(|x| !x.is_finite()) {
        return domain("frequency vector must be finite");
    }
    let n = cells as i64;
    let n2 = n * n;
    let scale = 1.0 / cells as f64;
    let last = u[m - 1];
    let half_rows = inner_prefix(cells, last);
    // number of positive odd k with k² ≤ r2
    let positive_count = |r2: i64| -> usize {
        if r2 < 1 {
            return 0;
        }
        ((isqrt(r2) + 1) / 2) as usize
    };
    let odd = |i: usize| 2 * i as i64 + 1 - n;

    let total = match m {
        1 => half_rows[cells / 2],
        2 => {
            let parts = exec.map_range(cells, |i| {
                let k = odd(i);
                let mut acc = NeumaierSum::new();
                acc.add((k as f64 * scale * u[0]).cos() * half_rows[positive_count(n2 - k * k)]);
                acc
            });
            merge_in_order(&parts)
        }
        _ => {
            let parts = exec.map_range(cells, |i| {
                let ki = odd(i);
                let mut acc = NeumaierSum::new();
                let a = ki as f64 * scale * u[0];
                for j in 0..cells {
                    let kj = odd(j);
                    let r2 = n2 - ki * ki - kj * kj;
                    if r2 < 1 {
                        continue;
                    }
                    let phase = a + kj as f64 * scale * u[1];
                    acc.add(phase.cos() * half_rows[positive_count(r2)]);
                }
                acc
            });
            merge_in_order(&parts)
        }
    };
    let h = 2.0 * scale;
    Ok(total * (h / (2.0 * PI)).powi(m as i32))
}

/// `out[p] = Σ_{|k| odd, |k| < 2p} cos(k u / cells)`, the inner-axis sum over
/// the symmetric range holding the 2p centers nearest zero.
fn inner_prefix(cells: usize, u: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(cells / 2 + 1);
    let mut acc = NeumaierSum::new();
    out.push(0.0);
    for p in 0..cells / 2 {
        let k = (2 * p + 1) as f64;
        acc.add(2.0 * (k * u / cells as f64).cos());
        out.push(acc.total());
    }
    out
}

fn merge_in_order(parts: &[NeumaierSum]) -> f64 {
    let mut total = NeumaierSum::new();
    for p in parts {
        total.merge(p);
    }
    total.total()
}

fn isqrt(v: i64) -> i64 {
    let mut r = (v as f64).sqrt() as i64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

/// `∫_{|ξ| ≤ 1} ξ^{2γ} dξ = (2/(2|γ|+m)) ∏_j Γ(γ_j + 1/2) / Γ(|γ| + m/2)`.
pub fn ball_moment(m: usize, gamma: &MultiIndex) -> Result<f64> {
    if m == 0 || gamma.dim() != m {
        return domain(format!("moment multi-index has length {}, expected {m} >= 1", gamma.dim()));
    }
    let total = gamma.order() as f64;
    let mf = m as f64;
    let prod: f64 = gamma.entries().iter().map(|&g| gamma_pos(g as f64 + 0.5)).product();
    Ok(2.0 / (2.0 * total + mf) * prod / gamma_pos(total + mf / 2.0))
}

fn check_pair(m: usize, alpha: &MultiIndex, beta: &MultiIndex) -> Result<()> {
    if m == 0 || alpha.dim() != m || beta.dim() != m {
        return domain(format!(
            "multi-indices of lengths {} and {} do not match dimension {m}",
            alpha.dim(),
            beta.dim()
        ));
    }
    Ok(())
}

/// Leading coefficient of `∂_x^α ∂_y^β E_L(x, y)` on the diagonal, in units
/// of `L^{(m+|α|+|β|)/2}`; zero unless α − β is even in every entry.
pub fn diagonal_coefficient(m: usize, alpha: &MultiIndex, beta: &MultiIndex) -> Result<f64> {
    check_pair(m, alpha, beta)?;
    let sums: Vec<u32> = alpha.entries().iter().zip(beta.entries()).map(|(a, b)| a + b).collect();
    if sums.iter().any(|s| s % 2 == 1) {
        return Ok(0.0);
    }
    let a = alpha.order() as i64;
    let b = beta.order() as i64;
    let half_total = (a + b) as f64 / 2.0;
    let sign = if ((a - b) / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let mut prod = 1.0;
    for &s in &sums {
        prod *= double_factorial(s as i64 - 1)? as f64;
    }
    let half_m = m as f64 / 2.0;
    Ok(sign * prod
        / ((4.0 * PI).powf(half_m) * 2f64.powf(half_total) * gamma_pos(1.0 + half_m + half_total)))
}

/// The same coefficient from the flat kernel directly: differentiating under
/// the integral gives `i^{|α|} (−i)^{|β|} (2π)^{-m} ∫_{B_1} ξ^{α+β} dξ`.
pub fn diagonal_coefficient_from_moment(m: usize, alpha: &MultiIndex, beta: &MultiIndex) -> Result<f64> {
    check_pair(m, alpha, beta)?;
    let sums: Vec<u32> = alpha.entries().iter().zip(beta.entries()).map(|(a, b)| a + b).collect();
    if sums.iter().any(|s| s % 2 == 1) {
        // odd moments of the ball vanish
        return Ok(0.0);
    }
    let half = MultiIndex::new(sums.iter().map(|s| s / 2).collect());
    // i^a (−i)^b = i^{a + 3b}; real since a + b is even
    let phase = match (alpha.order() + 3 * beta.order()) % 4 {
        0 => 1.0,
        2 => -1.0,
        _ => unreachable!("a + b is even"),
    };
    Ok(phase * ball_moment(m, &half)? / (2.0 * PI).powi(m as i32))
}
