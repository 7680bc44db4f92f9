//! Spectral function of the Laplacian on the round sphere S^{d−1} ⊂ R^d.
//!
//! The eigenspace of `λ_n = n(n+d−2)` has dimension `μ_n`, and the
//! addition formula collapses the sum over an orthonormal basis of it to
//! `(μ_n / σ_{d−1}) P_{n,d}(cos φ)`, where `P_{n,d}` is the Gegenbauer
//! polynomial normalized by `P_{n,d}(1) = 1` and φ is geodesic distance.
//! Summing over n ≤ N gives the spectral function `E_N(φ)`, which the
//! Christoffel–Darboux formula turns into a two-term closed form.

use std::f64::consts::PI;

use crate::compensated::NeumaierSum;
use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::jet::TaylorJet;
use crate::profile::{check_grid, Manifold, RadialProfile};
use crate::specfun::{gamma_pos, BesselOrder};

/// Below this gap `1 − cos φ` the closed form is replaced by the direct sum.
pub const CD_SMALL_ANGLE_GAP: f64 = 1e-6;

/// Area of the unit sphere S^{d−1}: `2π^{d/2} / Γ(d/2)`.
pub fn sphere_area(d: u32) -> Result<f64> {
    if d < 2 {
        return domain(format!("sphere_area needs d >= 2, got {d}"));
    }
    let half = d as f64 / 2.0;
    Ok(2.0 * PI.powf(half) / gamma_pos(half))
}

/// The round sphere S^{d−1}, given by its ambient dimension d ≥ 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphereGeometry {
    d: u32,
}

impl SphereGeometry {
    pub fn new(d: u32) -> Result<Self> {
        if d < 3 {
            return domain(format!("sphere ambient dimension must be >= 3, got {d}"));
        }
        Ok(Self { d })
    }

    pub fn ambient_dim(self) -> u32 {
        self.d
    }

    /// Dimension of the sphere itself, m = d − 1.
    pub fn dim(self) -> u32 {
        self.d - 1
    }

    /// Gegenbauer/Jacobi parameter α = (d − 3)/2 as a Bessel order.
    pub fn jacobi_alpha(self) -> BesselOrder {
        BesselOrder::from_twice(self.d - 3)
    }

    /// a_n = n + (d − 2)/2.
    pub fn hilb_frequency(self, n: u64) -> f64 {
        n as f64 + (self.d as f64 - 2.0) / 2.0
    }

    /// λ_n = n(n + d − 2).
    pub fn eigenvalue(self, n: u64) -> f64 {
        n as f64 * (n as f64 + self.d as f64 - 2.0)
    }

    /// μ_n = (2n+d−2)/(n+d−2) · C(n+d−2, d−2), exact.
    pub fn multiplicity(self, n: u64) -> Result<u128> {
        let overflow = || Error::Overflow(format!("multiplicity of degree {n} on S^{}", self.d - 1));
        let k = (self.d - 2) as u128;
        let n = n as u128;
        // C(n+k, k) built as running binomials C(n+i, i), each exact
        let mut binom: u128 = 1;
        for i in 1..=k {
            binom = binom.checked_mul(n + i).ok_or_else(overflow)? / i;
        }
        let num = binom.checked_mul(2 * n + k).ok_or_else(overflow)?;
        Ok(num / (n + k))
    }

    pub fn area(self) -> f64 {
        let half = self.d as f64 / 2.0;
        2.0 * PI.powf(half) / gamma_pos(half)
    }

    /// h_n = σ_{d−1} / (σ_{d−2} μ_n), the squared weighted L² norm of
    /// `P_{n,d}` against `(1 − t²)^{(d−3)/2}`.
    pub fn h_norm(self, n: u64) -> Result<f64> {
        let mu = self.multiplicity(n)? as f64;
        Ok(self.area() / (sphere_area(self.d - 1)? * mu))
    }

    /// k_n / k_{n+1} = (n + d − 2)/(2n + d − 2), ratio of consecutive
    /// leading coefficients.
    pub fn leading_ratio(self, n: u64) -> f64 {
        let d = self.d as f64;
        let n = n as f64;
        (n + d - 2.0) / (2.0 * n + d - 2.0)
    }

    #[inline]
    fn recurrence_step(self, k: u64, t: f64, p_prev: f64, p_cur: f64) -> f64 {
        let d = self.d as f64;
        let k = k as f64;
        ((2.0 * k + d - 2.0) * t * p_cur - k * p_prev) / (k + d - 2.0)
    }

    /// `P_{n,d}(t)` by the three-term recurrence from `P_0 = 1`, `P_1 = t`.
    pub fn legendre(self, n: u64, t: f64) -> Result<f64> {
        check_unit_interval(t)?;
        Ok(self.legendre_pair(n, t).0)
    }

    /// `(P_{n,d}(t), P_{n+1,d}(t))`.
    fn legendre_pair(self, n: u64, t: f64) -> (f64, f64) {
        let mut prev = 1.0;
        let mut cur = t;
        for k in 1..=n {
            let next = self.recurrence_step(k, t, prev, cur);
            prev = cur;
            cur = next;
        }
        (prev, cur)
    }

    /// Runs the recurrence in truncated power-series arithmetic: given the
    /// jet of `t(φ)`, returns the jet of `P_{n,d}(t(φ))`.
    pub fn legendre_jet(self, n: u64, t: &TaylorJet) -> Result<TaylorJet> {
        let mut out = None;
        self.for_each_legendre_jet(n, t, |k, p| {
            if k == n {
                out = Some(p.clone());
            }
        })?;
        Ok(out.expect("degree n visited"))
    }

    /// Jet of `P_{n,d}(cos φ)` at φ = 0 to the given order.
    pub fn legendre_jet_at_pole(self, n: u64, order: usize) -> Result<TaylorJet> {
        self.legendre_jet(n, &TaylorJet::cos_scaled(1.0, order)?)
    }

    fn for_each_legendre_jet<F: FnMut(u64, &TaylorJet)>(
        self,
        n: u64,
        t: &TaylorJet,
        mut visit: F,
    ) -> Result<()> {
        let order = t.order();
        let mut prev = TaylorJet::constant(t.center(), 1.0, order)?;
        visit(0, &prev);
        if n == 0 {
            return Ok(());
        }
        let mut cur = t.clone();
        visit(1, &cur);
        let d = self.d as f64;
        for k in 1..n {
            let kf = k as f64;
            let mut next = (t * &cur).scale(2.0 * kf + d - 2.0);
            next.axpy(-kf, &prev);
            let next = next.scale(1.0 / (kf + d - 2.0));
            prev = cur;
            cur = next;
            visit(k + 1, &cur);
        }
        Ok(())
    }

    /// `E_n` at `cos φ = t` from the addition formula:
    /// `Σ_{m≤n} (μ_m/σ_{d−1}) P_{m,d}(t)`, compensated.
    pub fn spectral_direct(self, n: u64, t: f64) -> Result<f64> {
        check_unit_interval(t)?;
        let mut acc = NeumaierSum::new();
        let mut prev = 1.0;
        let mut cur = t;
        acc.add(self.multiplicity(0)? as f64);
        for k in 1..=n {
            acc.add(self.multiplicity(k)? as f64 * cur);
            let next = self.recurrence_step(k, t, prev, cur);
            prev = cur;
            cur = next;
        }
        Ok(acc.total() / self.area())
    }

    /// `E_n(φ) = (μ_n/σ_{d−1}) (k_n/k_{n+1}) (P_{n+1,d} − P_{n,d})(cos φ) / (cos φ − 1)`,
    /// falling back to [`Self::spectral_direct`] when `1 − cos φ` is below
    /// [`CD_SMALL_ANGLE_GAP`].
    pub fn spectral_cd(self, n: u64, phi: f64) -> Result<f64> {
        if !(0.0..=PI).contains(&phi) {
            return domain(format!("geodesic distance must lie in [0, π], got {phi}"));
        }
        let t = phi.cos();
        if 1.0 - t < CD_SMALL_ANGLE_GAP {
            return self.spectral_direct(n, t);
        }
        let (p_n, p_next) = self.legendre_pair(n, t);
        let mu = self.multiplicity(n)? as f64;
        Ok(mu / self.area() * self.leading_ratio(n) * (p_next - p_n) / (t - 1.0))
    }

    /// `Σ_{m≤n} P_{m,d}(t) / h_m`, summed term by term.
    pub fn reproducing_sum_direct(self, n: u64, t: f64) -> Result<f64> {
        check_unit_interval(t)?;
        let mut acc = NeumaierSum::new();
        let mut prev = 1.0;
        let mut cur = t;
        acc.add(1.0 / self.h_norm(0)?);
        for k in 1..=n {
            acc.add(cur / self.h_norm(k)?);
            let next = self.recurrence_step(k, t, prev, cur);
            prev = cur;
            cur = next;
        }
        Ok(acc.total())
    }

    /// Christoffel–Darboux closed form of [`Self::reproducing_sum_direct`]
    /// at s = 1: `(k_n/k_{n+1}) (P_{n+1} − P_n)(t) / (h_n (t − 1))`.
    pub fn reproducing_sum_cd(self, n: u64, t: f64) -> Result<f64> {
        check_unit_interval(t)?;
        if t == 1.0 {
            return domain("the Christoffel–Darboux quotient is singular at t = 1");
        }
        let (p_n, p_next) = self.legendre_pair(n, t);
        Ok(self.leading_ratio(n) * (p_next - p_n) / (self.h_norm(n)? * (t - 1.0)))
    }

    /// Jet in φ of `E_n(φ / scale)` at φ = 0, i.e. the addition-formula sum
    /// carried through jet arithmetic with `t = cos(φ/scale)`.
    pub fn spectral_jet(self, n: u64, scale: f64, order: usize) -> Result<TaylorJet> {
        let t = TaylorJet::cos_scaled(1.0 / scale, order)?;
        let mut accs = vec![NeumaierSum::new(); order + 1];
        let mut mus = Vec::with_capacity(n as usize + 1);
        for k in 0..=n {
            mus.push(self.multiplicity(k)? as f64);
        }
        self.for_each_legendre_jet(n, &t, |k, p| {
            let mu = mus[k as usize];
            for (acc, c) in accs.iter_mut().zip(p.coeffs()) {
                acc.add(mu * c);
            }
        })?;
        let area = self.area();
        TaylorJet::new(0.0, accs.iter().map(|a| a.total() / area).collect())
    }

    /// r_n = √λ_n.
    pub fn rescaling_radius(self, n: u64) -> Result<f64> {
        if n == 0 {
            return domain("the rescaled profile needs n >= 1 (r_0 = 0)");
        }
        Ok(self.eigenvalue(n).sqrt())
    }

    /// `Ē_n(φ) = r_n^{−(d−1)} E_n(φ / r_n)`.
    pub fn rescaled_value(self, n: u64, phi: f64) -> Result<f64> {
        let r = self.rescaling_radius(n)?;
        let angle = phi / r;
        if !(phi >= 0.0) || angle > PI {
            return domain(format!("rescaled distance {phi} must lie in [0, π r_n] = [0, {}]", PI * r));
        }
        Ok(self.spectral_cd(n, angle)? / r.powi(self.d as i32 - 1))
    }

    /// Samples `Ē_n` on a grid of rescaled distances, each point independent.
    pub fn rescaled_profile(self, n: u64, phis: &[f64], exec: Execution) -> Result<RadialProfile> {
        self.rescaling_radius(n)?;
        check_grid(phis)?;
        let values = exec.try_map(phis, |&phi| self.rescaled_value(n, phi))?;
        RadialProfile::new(Manifold::Sphere, n as f64, phis.to_vec(), values)
    }

    /// Samples the unscaled `E_n(φ)` on a grid of geodesic distances.
    pub fn profile(self, n: u64, phis: &[f64], exec: Execution) -> Result<RadialProfile> {
        check_grid(phis)?;
        let values = exec.try_map(phis, |&phi| self.spectral_cd(n, phi))?;
        RadialProfile::new(Manifold::Sphere, n as f64, phis.to_vec(), values)
    }
}

fn check_unit_interval(t: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&t) {
        return domain(format!("Legendre argument must lie in [-1, 1], got {t}"));
    }
    Ok(())
}
