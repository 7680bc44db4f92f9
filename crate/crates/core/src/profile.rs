use std::fmt;

use crate::error::{domain, Result};

/// Which model manifold a profile was sampled on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manifold {
    Sphere,
    Torus,
    Euclid,
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Manifold::Sphere => "sphere",
            Manifold::Torus => "torus",
            Manifold::Euclid => "euclid",
        })
    }
}

/// A radial kernel sampled on a grid of distances.
///
/// `level` is the spectral level: the degree n on the sphere, the
/// eigenvalue cutoff L on the torus and in flat space.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    manifold: Manifold,
    level: f64,
    distances: Vec<f64>,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(manifold: Manifold, level: f64, distances: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if distances.len() != values.len() {
            return domain(format!(
                "profile has {} distances but {} values",
                distances.len(),
                values.len()
            ));
        }
        check_grid(&distances)?;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return domain(format!("profile value {v} is not finite"));
        }
        Ok(Self { manifold, level, distances, values })
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.distances.iter().copied().zip(self.values.iter().copied())
    }

    /// Divides every value by `value_at_zero`-style normalizer.
    pub fn normalized_by(&self, norm: f64) -> Result<Self> {
        if norm == 0.0 || !norm.is_finite() {
            return domain(format!("cannot normalize by {norm}"));
        }
        Ok(Self {
            values: self.values.iter().map(|v| v / norm).collect(),
            ..self.clone()
        })
    }

    /// sup_i |values_i − f(distances_i)|.
    pub fn sup_distance<F: Fn(f64) -> Result<f64>>(&self, f: F) -> Result<f64> {
        let mut sup = 0.0_f64;
        for (r, v) in self.iter() {
            sup = sup.max((v - f(r)?).abs());
        }
        Ok(sup)
    }
}

/// Checks that a distance grid is non-negative, finite and strictly
/// increasing.
pub fn check_grid(distances: &[f64]) -> Result<()> {
    for (i, &r) in distances.iter().enumerate() {
        if !(r >= 0.0) || !r.is_finite() {
            return domain(format!("grid point {r} must be finite and >= 0"));
        }
        if i > 0 && r <= distances[i - 1] {
            return domain("grid must be strictly increasing");
        }
    }
    Ok(())
}

/// `samples` equally spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (samples - 1) as f64;
            (0..samples)
                .map(|i| if i == samples - 1 { hi } else { lo + i as f64 * step })
                .collect()
        }
    }
}
