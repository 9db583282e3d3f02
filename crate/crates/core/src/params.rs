//! The `(n, gamma)` pair every formula is parameterized by.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of the band around the excluded exponent inside which construction logs a warning.
pub const DEFAULT_GUARD_BAND: f64 = 1e-9;

/// Dimension `n >= 2` and weight exponent `gamma` of the inequality
/// `int |x|^(2g-2) |u|^2 <= C int |x|^(2g) |grad u|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    n: usize,
    gamma: f64,
}

impl Params {
    pub fn new(n: usize, gamma: f64) -> Result<Self> {
        Self::with_guard_band(n, gamma, DEFAULT_GUARD_BAND)
    }

    /// Like [`Params::new`], with a custom warning band around the excluded exponent.
    /// The exclusion itself is an exact comparison.
    pub fn with_guard_band(n: usize, gamma: f64, band: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        if !gamma.is_finite() {
            return Err(Error::NonFiniteGamma(gamma));
        }
        let excluded = Self::excluded_gamma(n);
        if gamma == excluded {
            return Err(Error::ForbiddenGamma {
                n,
                gamma,
                excluded,
                rule: if n == 2 { "gamma" } else { "gamma = 1 - n/2" },
            });
        }
        if (gamma - excluded).abs() < band {
            log::warn!(
                "gamma = {gamma} is within {band:e} of the excluded value {excluded} for n = {n}; \
                 the constant is close to blowing up"
            );
        }
        Ok(Self { n, gamma })
    }

    /// The exponent at which the weighted radial term vanishes: `1 - n/2` (`0` for `n = 2`).
    pub fn excluded_gamma(n: usize) -> f64 {
        1.0 - n as f64 / 2.0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    pub fn is_planar(&self) -> bool {
        self.n == 2
    }

    /// `(n/2 + gamma - 1)^2`, the part of `1/C` contributed by the radial substitution.
    pub fn radial_term(&self) -> f64 {
        let a = self.dim() / 2.0 + self.gamma - 1.0;
        a * a
    }

    /// `n/2 - gamma`, the shift in the log-radial divergence constraint.
    pub fn shift(&self) -> f64 {
        self.dim() / 2.0 - self.gamma
    }

    /// Exponent of the substitution `v = u |x|^(gamma - 1 + n/2)`.
    pub fn substitution_exponent(&self) -> f64 {
        self.gamma - 1.0 + self.dim() / 2.0
    }
}

impl std::fmt::Display for Params {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(n = {}, gamma = {})", self.n, self.gamma)
    }
}
