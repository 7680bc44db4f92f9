//! Truncated power series about a point.

use std::ops::{Add, Mul, Sub};

use crate::error::{domain, Result};

/// Highest supported truncation order.
pub const MAX_JET_ORDER: usize = 16;

/// Coefficients of `(x − center)^k` for `k = 0..=order`.
///
/// Arithmetic between jets truncates at the common order; both operands
/// must share center and order.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorJet {
    center: f64,
    coeffs: Vec<f64>,
}

impl TaylorJet {
    pub fn new(center: f64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return domain("a jet needs at least one coefficient");
        }
        if coeffs.len() > MAX_JET_ORDER + 1 {
            return domain(format!(
                "jet order {} exceeds the cap of {MAX_JET_ORDER}",
                coeffs.len() - 1
            ));
        }
        Ok(Self { center, coeffs })
    }

    pub fn constant(center: f64, value: f64, order: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Self::new(center, coeffs)
    }

    /// The jet of the identity map `x ↦ x` at `center`.
    pub fn variable(center: f64, order: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = center;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Self::new(center, coeffs)
    }

    /// The jet of `x ↦ cos(scale · x)` at 0.
    pub fn cos_scaled(scale: f64, order: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; order + 1];
        let mut c = 1.0;
        for (k, slot) in coeffs.iter_mut().enumerate() {
            if k > 0 {
                c *= scale / k as f64;
            }
            *slot = match k % 4 {
                0 => c,
                2 => -c,
                _ => 0.0,
            };
        }
        Self::new(0.0, coeffs)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// `d^k/dx^k` at the center, i.e. `k! · coeff(k)`.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        fact * self.coeff(k)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            center: self.center,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// `self + a · other`, in place.
    pub fn axpy(&mut self, a: f64, other: &TaylorJet) {
        self.check_compatible(other);
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += a * y;
        }
    }

    /// Evaluates the truncated polynomial at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let h = x - self.center;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * h + c)
    }

    fn check_compatible(&self, other: &TaylorJet) {
        assert_eq!(self.coeffs.len(), other.coeffs.len(), "jet order mismatch");
        assert!(
            self.center == other.center || (self.center.is_nan() && other.center.is_nan()),
            "jet center mismatch"
        );
    }
}

impl Add<&TaylorJet> for &TaylorJet {
    type Output = TaylorJet;

    fn add(self, rhs: &TaylorJet) -> TaylorJet {
        self.check_compatible(rhs);
        TaylorJet {
            center: self.center,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&TaylorJet> for &TaylorJet {
    type Output = TaylorJet;

    fn sub(self, rhs: &TaylorJet) -> TaylorJet {
        self.check_compatible(rhs);
        TaylorJet {
            center: self.center,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<&TaylorJet> for &TaylorJet {
    type Output = TaylorJet;

    /// Cauchy product truncated at the common order.
    fn mul(self, rhs: &TaylorJet) -> TaylorJet {
        self.check_compatible(rhs);
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.coeffs[..n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TaylorJet { center: self.center, coeffs: out }
    }
}
