//! Closed-form sharp constants.
//!
//! Every constant is reported through its inverse decomposition
//! `1/C = (n/2 + gamma - 1)^2 + angular infimum`, where the radial term is what
//! the unconstrained (classical) inequality already gives and the angular
//! infimum is the improvement bought by the divergence-free constraint.

use serde::{Deserialize, Serialize};

use crate::minimize::golden_section_minimize;
use crate::params::Params;

/// Default relative tolerance for comparing constants computed along different routes.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Which closed-form expression produced a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `n > 2`, `gamma <= 1`: the lowest poloidal mode at zero frequency.
    #[serde(rename = "PoloidalGammaLE1")]
    PoloidalGammaLe1,
    /// `n > 2`, `gamma > 1`: `min{n - 1, 2 + min_x (x + A/(x + B))}`.
    #[serde(rename = "GammaGT1TwoLevelMin")]
    GammaGt1TwoLevelMin,
    /// `n = 2`, `gamma` inside `[-1 - sqrt 3, sqrt 3 - 1]`: angular wavenumber one.
    #[serde(rename = "TwoD_NuOne")]
    TwoDNuOne,
    /// `n = 2`, `gamma` outside that interval: the purely azimuthal, angle-independent field.
    #[serde(rename = "TwoD_NuZero")]
    TwoDNuZero,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::PoloidalGammaLe1 => "PoloidalGammaLE1",
            Branch::GammaGt1TwoLevelMin => "GammaGT1TwoLevelMin",
            Branch::TwoDNuOne => "TwoD_NuOne",
            Branch::TwoDNuZero => "TwoD_NuZero",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantBreakdown {
    pub c: f64,
    pub c_inverse: f64,
    /// `(n/2 + gamma - 1)^2`.
    pub radial_term: f64,
    pub angular_infimum: f64,
    pub branch: Branch,
}

/// `4 / (2 gamma + n - 2)^2`, the sharp constant without the divergence constraint.
pub fn classical_constant(p: &Params) -> f64 {
    let d = 2.0 * p.gamma() + p.dim() - 2.0;
    4.0 / (d * d)
}

/// Closed-form minimum of `x + a/(x + b)` over `x >= 0`, for `a >= 0`, `b > 0`.
///
/// Returns `(x_min, value)`. The stationary point `x = sqrt(a) - b` is used when it is
/// non-negative, otherwise the minimum sits at `x = 0`.
pub fn inner_minimum(a: f64, b: f64) -> (f64, f64) {
    let root = a.sqrt();
    if b >= root {
        (0.0, a / b)
    } else {
        (root - b, 2.0 * root - b)
    }
}

/// Golden-section cross-check of [`inner_minimum`] on `[0, sqrt(a) + 1]`.
pub fn inner_minimum_search(a: f64, b: f64) -> (f64, f64) {
    golden_section_minimize(|x| x + a / (x + b), 0.0, a.sqrt() + 1.0, 1e-10)
}

/// Coefficients `A = 4(n-1)(gamma-1)` and `B = n - 1 + (gamma - n/2)^2` of the `gamma > 1` inner problem.
pub fn inner_coefficients(n: f64, gamma: f64) -> (f64, f64) {
    let b = n - 1.0 + (gamma - n / 2.0).powi(2);
    (4.0 * (n - 1.0) * (gamma - 1.0), b)
}

/// The `gamma <= 1` formula `4/(2g+n-2)^2 (1 - 2/(n + 1 + (g - n/2)^2))`, evaluated at any `gamma`.
pub fn poloidal_branch_constant(n: f64, gamma: f64) -> f64 {
    let d = 2.0 * gamma + n - 2.0;
    4.0 / (d * d) * (1.0 - 2.0 / (n + 1.0 + (gamma - n / 2.0).powi(2)))
}

/// The `gamma > 1` two-level minimum formula, evaluated at any `gamma >= 1`.
/// Returns `(C, angular infimum)`.
pub fn two_level_min_constant(n: f64, gamma: f64) -> (f64, f64) {
    let (a, b) = inner_coefficients(n, gamma);
    let (_, inner) = inner_minimum(a, b);
    debug_assert!(
        {
            let (_, searched) = inner_minimum_search(a, b);
            (searched - inner).abs() <= 1e-8 * inner.abs().max(1.0)
        },
        "closed-form inner minimum disagrees with golden-section search at n = {n}, gamma = {gamma}"
    );
    let angular = (n - 1.0).min(2.0 + inner);
    let radial = (n / 2.0 + gamma - 1.0).powi(2);
    (1.0 / (radial + angular), angular)
}

/// Planar constant on the wavenumber-one branch: `gamma^-2 (1 + (1-g)^2)/(3 + (1-g)^2)`.
pub fn planar_nu_one_constant(gamma: f64) -> f64 {
    let s = (1.0 - gamma).powi(2);
    (1.0 + s) / ((3.0 + s) * gamma * gamma)
}

/// Planar constant on the azimuthal branch: `1/(gamma^2 + 1)`.
pub fn planar_nu_zero_constant(gamma: f64) -> f64 {
    1.0 / (gamma * gamma + 1.0)
}

/// Endpoints `[-1 - sqrt 3, sqrt 3 - 1]` of the planar wavenumber-one interval.
pub fn planar_branch_interval() -> (f64, f64) {
    let r3 = 3f64.sqrt();
    (-1.0 - r3, r3 - 1.0)
}

/// The sharp constant for divergence-free fields (axisymmetric when `n > 2`).
pub fn sharp_constant(p: &Params) -> ConstantBreakdown {
    let n = p.dim();
    let gamma = p.gamma();
    let radial_term = p.radial_term();

    let (c, branch) = if p.is_planar() {
        let (lo, hi) = planar_branch_interval();
        if (lo..=hi).contains(&gamma) {
            (planar_nu_one_constant(gamma), Branch::TwoDNuOne)
        } else {
            (planar_nu_zero_constant(gamma), Branch::TwoDNuZero)
        }
    } else if gamma <= 1.0 {
        (poloidal_branch_constant(n, gamma), Branch::PoloidalGammaLe1)
    } else {
        (two_level_min_constant(n, gamma).0, Branch::GammaGt1TwoLevelMin)
    };

    let c_inverse = 1.0 / c;
    ConstantBreakdown {
        c,
        c_inverse,
        radial_term,
        angular_infimum: c_inverse - radial_term,
        branch,
    }
}

/// The three-dimensional specialization. Rejects the excluded exponent `gamma = -1/2`.
pub fn sharp_constant_3d(gamma: f64) -> crate::Result<f64> {
    // validation only; the formula below is evaluated independently of the general one
    Params::new(3, gamma)?;
    let s = (gamma - 1.5).powi(2);
    let d = 2.0 * gamma + 1.0;
    Ok(if gamma <= 1.0 {
        4.0 / (d * d) * (2.0 + s) / (4.0 + s)
    } else {
        4.0 / (8.0 + d * d)
    })
}

/// Ratio of the divergence-free constant to the classical one; always below one.
pub fn improvement_ratio(p: &Params) -> f64 {
    sharp_constant(p).c / classical_constant(p)
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
