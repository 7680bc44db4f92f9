//! Spectral function of a flat cubic torus `R^m / (side · Z^m)`.
//!
//! The plane waves `e^{i k·x}`, `k ∈ (2π/side) Z^m`, are an eigenbasis with
//! eigenvalue `|k|²`, so `E_L(u) = side^{-m} Σ_{|k|² ≤ L} cos(k·u)`.

use std::f64::consts::PI;

use crate::compensated::NeumaierSum;
use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::profile::{check_grid, Manifold, RadialProfile};

/// Default cap on the number of lattice points in one sum.
pub const DEFAULT_POINT_BUDGET: u64 = 100_000_000;

/// Shell indices must stay exactly representable as f64.
const MAX_SHELL: u64 = 1 << 53;

const UNIT_BALL_VOLUME: [f64; 3] = [2.0, PI, 4.0 * PI / 3.0];

/// Shells accumulated per pass; bounds the bucket array at 16 MiB.
const SHELLS_PER_CHUNK: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGeometry {
    m: usize,
    side: f64,
}

impl TorusGeometry {
    pub fn new(m: usize, side: f64) -> Result<Self> {
        if !(1..=3).contains(&m) {
            return Err(Error::UnsupportedDimension { dim: m, supported: "1, 2, 3" });
        }
        if !(side > 0.0) || !side.is_finite() {
            return domain(format!("torus side must be finite and > 0, got {side}"));
        }
        Ok(Self { m, side })
    }

    pub fn dim(self) -> usize {
        self.m
    }

    pub fn side(self) -> f64 {
        self.side
    }

    pub fn volume(self) -> f64 {
        self.side.powi(self.m as i32)
    }

    /// Length of the fundamental dual vector, 2π/side.
    pub fn frequency_unit(self) -> f64 {
        2.0 * PI / self.side
    }

    /// Largest integer q with `(2π/side)² q ≤ L`.
    pub fn max_shell(self, level: f64) -> Result<u64> {
        if !(level >= 0.0) || !level.is_finite() {
            return domain(format!("spectral level must be finite and >= 0, got {level}"));
        }
        let unit2 = self.frequency_unit().powi(2);
        let ratio = level / unit2;
        if ratio >= MAX_SHELL as f64 {
            return Err(Error::Overflow(format!("shell index L/(2π/side)² = {ratio:e} exceeds 2^53")));
        }
        let mut q = ratio.floor() as u64;
        while q > 0 && unit2 * q as f64 > level {
            q -= 1;
        }
        while unit2 * (q + 1) as f64 <= level {
            q += 1;
        }
        Ok(q)
    }

    /// Exact number of integer vectors n with `|n|² ≤ q`. Cost grows like
    /// `q^{(m-1)/2}`; see [`TorusGeometry::budgeted_count`] for untrusted q.
    pub fn lattice_count_within(self, q: u64) -> u64 {
        fn rec(dims_left: usize, r2: u64) -> u64 {
            let b = isqrt(r2);
            if dims_left == 1 {
                return 2 * b + 1;
            }
            let mut total = rec(dims_left - 1, r2);
            for a in 1..=b {
                total += 2 * rec(dims_left - 1, r2 - a * a);
            }
            total
        }
        rec(self.m, q)
    }

    /// Exact lattice count for shells up to q, or a resource error when it
    /// exceeds `budget`. Hopeless requests are rejected from the ball volume
    /// before any counting.
    pub fn budgeted_count(self, q: u64, budget: u64) -> Result<u64> {
        let estimate = UNIT_BALL_VOLUME[self.m - 1] * (q as f64).powf(self.m as f64 / 2.0);
        if estimate > 2.0 * budget as f64 + 1e6 {
            let needed = estimate.min(u64::MAX as f64) as u64;
            return Err(Error::Resource { what: "lattice points", needed, budget });
        }
        let count = self.lattice_count_within(q);
        if count > budget {
            return Err(Error::Resource { what: "lattice points", needed: count, budget });
        }
        Ok(count)
    }

    /// Number of eigenvalues ≤ L counted with multiplicity, within the
    /// default point budget.
    pub fn lattice_count(self, level: f64) -> Result<u64> {
        self.budgeted_count(self.max_shell(level)?, DEFAULT_POINT_BUDGET)
    }

    pub fn spectral(self, level: f64, u: &[f64]) -> Result<f64> {
        self.spectral_with_budget(level, u, DEFAULT_POINT_BUDGET)
    }

    /// `E_L(u)`. Lattice points are accumulated shell by shell (one
    /// compensated sum per value of `|n|²`, lexicographic within a shell)
    /// and the shells are merged in ascending order.
    pub fn spectral_with_budget(self, level: f64, u: &[f64], budget: u64) -> Result<f64> {
        if u.len() != self.m {
            return domain(format!("displacement has length {}, expected {}", u.len(), self.m));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return domain("displacement must be finite");
        }
        let q_max = self.max_shell(level)?;
        self.budgeted_count(q_max, budget)?;
        let unit = self.frequency_unit();
        let w: Vec<f64> = u.iter().map(|x| unit * x).collect();

        let mut total = NeumaierSum::new();
        let mut buckets = vec![NeumaierSum::new(); (q_max + 1).min(SHELLS_PER_CHUNK) as usize];
        let mut lo = 0u64;
        while lo <= q_max {
            let hi = (lo + SHELLS_PER_CHUNK - 1).min(q_max);
            buckets.iter_mut().for_each(|b| *b = NeumaierSum::new());
            let mut prefix = [0i64; 3];
            accumulate_annulus(&w, 0, &mut prefix, 0, 0.0, lo, hi, &mut buckets);
            for b in &buckets[..(hi - lo + 1) as usize] {
                total.merge(b);
            }
            lo = hi + 1;
        }
        Ok(total.total() / self.volume())
    }

    /// `Ē_L(s) = L^{-m/2} E_L((s/√L) · direction)` on a grid of rescaled
    /// distances; each grid point is an independent lattice sum.
    pub fn rescaled_profile(
        self,
        level: f64,
        direction: &[f64],
        ss: &[f64],
        exec: Execution,
    ) -> Result<RadialProfile> {
        if !(level > 0.0) || !level.is_finite() {
            return domain(format!("rescaling needs a finite level L > 0, got {level}"));
        }
        if direction.len() != self.m {
            return domain(format!("direction has length {}, expected {}", direction.len(), self.m));
        }
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return domain(format!("direction must be a unit vector, |v| = {norm}"));
        }
        check_grid(ss)?;
        let root = level.sqrt();
        let chart = root * self.side / 4.0;
        if let Some(&s) = ss.iter().find(|&&s| s > chart) {
            return domain(format!("rescaled distance {s} leaves the chart bound √L·side/4 = {chart}"));
        }
        self.lattice_count(level)?;
        let norm_factor = level.powf(-(self.m as f64) / 2.0);
        let values = exec.try_map(ss, |&s| {
            let u: Vec<f64> = direction.iter().map(|d| s / root * d).collect();
            Ok::<_, Error>(norm_factor * self.spectral(level, &u)?)
        })?;
        RadialProfile::new(Manifold::Torus, level, ss.to_vec(), values)
    }
}

/// Adds `cos(n·w)` into `buckets[|n|² − lo]` for every integer vector n with
/// `lo ≤ |n|² ≤ hi`, visiting n in lexicographic order.
#[allow(clippy::too_many_arguments)]
fn accumulate_annulus(
    w: &[f64],
    axis: usize,
    prefix: &mut [i64; 3],
    partial_norm: u64,
    partial_phase: f64,
    lo: u64,
    hi: u64,
    buckets: &mut [NeumaierSum],
) {
    let m = w.len();
    let room = hi - partial_norm;
    let b = isqrt(room) as i64;
    if axis + 1 < m {
        for n in -b..=b {
            prefix[axis] = n;
            let q = partial_norm + (n * n) as u64;
            accumulate_annulus(w, axis + 1, prefix, q, partial_phase + n as f64 * w[axis], lo, hi, buckets);
        }
        return;
    }
    // last axis: n² ∈ [lo − partial, hi − partial]
    let a = if partial_norm >= lo { 0 } else { ceil_sqrt(lo - partial_norm) as i64 };
    if a > b {
        return;
    }
    let wl = w[axis];
    let mut visit = |n: i64| {
        let q = partial_norm + (n * n) as u64;
        buckets[(q - lo) as usize].add((partial_phase + n as f64 * wl).cos());
    };
    if a == 0 {
        (-b..=b).for_each(&mut visit);
    } else {
        (-b..=-a).for_each(&mut visit);
        (a..=b).for_each(&mut visit);
    }
}

fn isqrt(v: u64) -> u64 {
    let mut r = (v as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > v) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= v) {
        r += 1;
    }
    r
}

fn ceil_sqrt(v: u64) -> u64 {
    let r = isqrt(v);
    if r * r == v {
        r
    } else {
        r + 1
    }
}
