//! Special functions: Gamma, double factorial, Bessel functions of the
//! first kind of integer and half-integer order, and the universal radial
//! profile `K_m(s) = (2πs)^{-m/2} J_{m/2}(s)`.

use std::f64::consts::PI;

use crate::compensated::{DoubleDouble, NeumaierSum};
use crate::error::{domain, Error, Result};

/// Below this argument `J_ν` is summed from its power series; above it the
/// closed forms (half-integer order) or Bessel's integral (integer order)
/// take over.
pub const BESSEL_SERIES_CROSSOVER: f64 = 20.0;

const SERIES_REL_CUTOFF: f64 = 1e-18;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for x > 0.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("gamma_fn requires a finite x > 0, got {x}"));
    }
    Ok(gamma_pos(x))
}

pub(crate) fn gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x+1)/x keeps the Lanczos sum in its accurate range.
        return gamma_pos(x + 1.0) / x;
    }
    if x == x.floor() && x <= 21.0 {
        // exact in f64 up to 20!
        return (1..x as u64).map(|k| k as f64).product();
    }
    let z = x - 1.0;
    let mut a = LANCZOS_COEFFS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

/// k!! = k(k−2)(k−4)…, with (−1)!! = 0!! = 1.
pub fn double_factorial(k: i64) -> Result<u128> {
    if k < -1 {
        return domain(format!("double factorial undefined for {k}"));
    }
    let mut acc: u128 = 1;
    let mut i = k;
    while i > 1 {
        acc = acc
            .checked_mul(i as u128)
            .ok_or_else(|| Error::Overflow(format!("{k}!! exceeds 128 bits")))?;
        i -= 2;
    }
    Ok(acc)
}

/// Order of a Bessel function, restricted to integers and half-integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BesselOrder {
    twice_order: u32,
}

impl BesselOrder {
    /// The order `twice_order / 2`.
    pub const fn from_twice(twice_order: u32) -> Self {
        Self { twice_order }
    }

    pub const fn integer(n: u32) -> Self {
        Self { twice_order: 2 * n }
    }

    /// Accepts any non-negative multiple of 1/2.
    pub fn new(nu: f64) -> Result<Self> {
        let twice = 2.0 * nu;
        if !(nu >= 0.0) || twice != twice.round() || twice > u32::MAX as f64 {
            return domain(format!("Bessel order must be a non-negative multiple of 1/2, got {nu}"));
        }
        Ok(Self { twice_order: twice as u32 })
    }

    pub const fn twice_order(self) -> u32 {
        self.twice_order
    }

    pub fn value(self) -> f64 {
        self.twice_order as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice_order.is_multiple_of(2)
    }

    /// ν + 1.
    pub const fn next(self) -> Self {
        Self { twice_order: self.twice_order + 2 }
    }
}

/// Σ_k (−q)^k / (k! (ν+1)_k), summed in double-double so that the large
/// alternating terms at q ≈ 100 do not swamp the result.
fn reduced_series(nu: f64, q: f64) -> f64 {
    let neg_q = DoubleDouble::from_f64(-q);
    let mut term = DoubleDouble::from_f64(1.0);
    let mut sum = term;
    let mut max_term = 1.0_f64;
    let mut k = 1.0_f64;
    loop {
        term = (term * neg_q).div_f64(k * (nu + k));
        sum += term;
        let mag = term.hi.abs();
        max_term = max_term.max(mag);
        // terms decrease once k(ν+k) > q
        if k * (k + nu) > q
            && (mag <= SERIES_REL_CUTOFF * sum.hi.abs() || mag <= 1e-33 * max_term)
        {
            break;
        }
        k += 1.0;
    }
    sum.to_f64()
}

/// Power-series evaluation of `J_ν(x)`; accurate to ~1e-16 absolute for
/// x ≤ 20 and still usable well beyond thanks to double-double summation.
pub fn bessel_j_series(nu: BesselOrder, x: f64) -> Result<f64> {
    check_bessel_arg(x)?;
    let v = nu.value();
    if x == 0.0 {
        return Ok(if nu.twice_order == 0 { 1.0 } else { 0.0 });
    }
    let half = 0.5 * x;
    Ok(half.powf(v) / gamma_pos(v + 1.0) * reduced_series(v, half * half))
}

/// Closed-form spherical-Bessel evaluation of `J_{l+1/2}(x)` as a finite
/// combination of `sin x` and `cos x`. Loses digits for x ≪ l.
pub fn bessel_j_half_integer_closed(nu: BesselOrder, x: f64) -> Result<f64> {
    check_bessel_arg(x)?;
    if nu.is_integer() {
        return domain(format!("closed form needs a half-integer order, got {}", nu.value()));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let l = (nu.twice_order - 1) / 2;
    let (s, c) = x.sin_cos();
    // x·j_l(x) via the upward recurrence on Riccati–Bessel functions
    let mut prev = s; // x j_0
    if l == 0 {
        return Ok((2.0 / (PI * x)).sqrt() * prev);
    }
    let mut cur = s / x - c; // x j_1
    for k in 1..l {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    Ok((2.0 / (PI * x)).sqrt() * cur)
}

/// Bessel's integral `J_n(x) = (1/π) ∫_0^π cos(nτ − x sin τ) dτ` for integer
/// n, by the trapezoid rule, which converges geometrically for this periodic
/// integrand once the node count exceeds x + n.
pub fn bessel_j_integral(n: u32, x: f64) -> Result<f64> {
    check_bessel_arg(x)?;
    let intervals = x.ceil() as usize + n as usize + 32;
    let h = PI / intervals as f64;
    let nf = n as f64;
    let mut acc = NeumaierSum::new();
    for i in 0..=intervals {
        let tau = i as f64 * h;
        let w = if i == 0 || i == intervals { 0.5 } else { 1.0 };
        acc.add(w * (nf * tau - x * tau.sin()).cos());
    }
    Ok(acc.total() * h / PI)
}

fn check_bessel_arg(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("Bessel argument must be finite and >= 0, got {x}"));
    }
    Ok(())
}

/// `J_ν(x)` for integer or half-integer ν and x ≥ 0.
pub fn bessel_j(nu: BesselOrder, x: f64) -> Result<f64> {
    check_bessel_arg(x)?;
    if x <= BESSEL_SERIES_CROSSOVER {
        bessel_j_series(nu, x)
    } else if nu.is_integer() {
        bessel_j_integral(nu.twice_order / 2, x)
    } else {
        bessel_j_half_integer_closed(nu, x)
    }
}

fn check_dimension(m: u32) -> Result<()> {
    if m == 0 {
        return domain("profile dimension m must be >= 1");
    }
    Ok(())
}

/// `K_m(0) = 1 / ((4π)^{m/2} Γ(1 + m/2))`, the volume of the unit m-ball
/// divided by (2π)^m.
pub fn universal_profile_at_zero(m: u32) -> Result<f64> {
    check_dimension(m)?;
    let half_m = m as f64 / 2.0;
    Ok(1.0 / ((4.0 * PI).powf(half_m) * gamma_pos(1.0 + half_m)))
}

/// The universal radial profile `K_m(s) = (2πs)^{-m/2} J_{m/2}(s)`,
/// continuous at s = 0.
pub fn universal_profile(m: u32, s: f64) -> Result<f64> {
    check_dimension(m)?;
    if !(s >= 0.0) || !s.is_finite() {
        return domain(format!("profile radius must be finite and >= 0, got {s}"));
    }
    let half_m = m as f64 / 2.0;
    if s <= BESSEL_SERIES_CROSSOVER {
        let h = 0.5 * s;
        return Ok(universal_profile_at_zero(m)? * reduced_series(half_m, h * h));
    }
    let j = bessel_j(BesselOrder::from_twice(m), s)?;
    Ok(j / (2.0 * PI * s).powf(half_m))
}

/// `d^j/ds^j K_m(0)`: zero for odd j, and for j = 2k
/// `(−1)^k (2k)! / (4^k k! Γ(k + m/2 + 1) (4π)^{m/2})`.
pub fn universal_profile_derivative_at_zero(m: u32, j: u32) -> Result<f64> {
    check_dimension(m)?;
    if j % 2 == 1 {
        return Ok(0.0);
    }
    let k = (j / 2) as f64;
    let half_m = m as f64 / 2.0;
    let sign = if (j / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let ratio = gamma_pos(2.0 * k + 1.0) / gamma_pos(k + 1.0);
    Ok(sign * ratio
        / (4f64.powf(k) * gamma_pos(k + half_m + 1.0) * (4.0 * PI).powf(half_m)))
}
