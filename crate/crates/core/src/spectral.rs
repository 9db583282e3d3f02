//! The reduced minimization problem left after the log-radial Fourier transform.
//!
//! After substituting `t = log rho`, transforming in `t` (frequency `lambda`) and
//! expanding the polar component in eigenfunctions of the angular operator `T`
//! (eigenvalues `alpha_nu = nu (nu + n - 2)`), the constrained Rayleigh quotient
//! becomes a scalar function of `x = lambda^2` and `alpha_nu`. This module evaluates
//! those functions, their closed-form infima, and a brute-force grid oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{inner_coefficients, inner_minimum};
use crate::error::{Error, Result};
use crate::params::Params;

/// Default cap on the angular index in grid searches.
pub const DEFAULT_NU_MAX: u32 = 64;
/// Default upper end of the frequency grid.
pub const DEFAULT_LAMBDA_MAX: f64 = 10.0;
/// Default number of frequency samples, `lambda = 0` included.
pub const DEFAULT_LAMBDA_POINTS: usize = 2001;

/// `alpha_nu = nu (nu + n - 2)`.
pub fn eigenvalue(nu: u32, n: usize) -> f64 {
    let nu = nu as f64;
    nu * (nu + n as f64 - 2.0)
}

/// Argument of [`f_2d`] for a planar mode `e^{i m phi}`: the eigenvalue `m^2` of `-d^2/dphi^2`.
pub fn planar_eigenvalue(m: u32) -> u32 {
    m * m
}

/// Coordinates `(lambda, nu, alpha_nu)` of one mode of the reduced problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub lambda: f64,
    pub nu: u32,
    pub alpha: f64,
}

impl SpectralPoint {
    /// For `n > 2` the polar component must vanish at the poles, which excludes `nu = 0`.
    pub fn new(lambda: f64, nu: u32, n: usize) -> Result<Self> {
        if n > 2 && nu == 0 {
            return Err(Error::Domain("poloidal modes need nu >= 1 when n > 2".into()));
        }
        Ok(Self { lambda, nu, alpha: eigenvalue(nu, n) })
    }
}

/// Values of the numerator form `Q` and denominator form `q` on a single mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedQuotient {
    pub numerator_form: f64,
    pub denominator_form: f64,
    pub value: f64,
}

fn require_axisymmetric(p: &Params) -> Result<()> {
    if p.is_planar() {
        Err(Error::Domain("this reduction is defined for n > 2".into()))
    } else {
        Ok(())
    }
}

/// `f(x, alpha) = x - n + 3 + alpha (1 - 16(1 - gamma) / (4x + 4 alpha + (n - 2 gamma)^2))`.
pub fn f_axisym(x: f64, alpha: f64, p: &Params) -> Result<f64> {
    require_axisymmetric(p)?;
    let n = p.dim();
    let gamma = p.gamma();
    let denom = 4.0 * x + 4.0 * alpha + (n - 2.0 * gamma).powi(2);
    if denom == 0.0 {
        return Err(Error::Domain(format!("f is singular at x = {x}, alpha = {alpha} for {p}")));
    }
    Ok(x - n + 3.0 + alpha * (1.0 - 16.0 * (1.0 - gamma) / denom))
}

/// Reduced Rayleigh quotient `Q/q` of a single poloidal mode `w_theta = h(lambda) Y_nu(theta)`.
///
/// Evaluated from the forms themselves, not from [`f_axisym`]; the two agree identically.
pub fn mode_quotient(s: &SpectralPoint, p: &Params) -> Result<ReducedQuotient> {
    require_axisymmetric(p)?;
    let n = p.dim();
    let gamma = p.gamma();
    let l2 = s.lambda * s.lambda;
    let big_l = l2 + p.shift().powi(2);
    if big_l == 0.0 {
        return Err(Error::Domain(format!(
            "lambda = 0 with gamma = n/2 makes the reduced forms singular for {p}"
        )));
    }
    let alpha = s.alpha;
    let numerator_form =
        ((-n - 1.0 + l2 + 4.0 * gamma) / big_l + 1.0) * alpha + l2 - n + 3.0 + alpha * alpha / big_l;
    let denominator_form = alpha / big_l + 1.0;
    Ok(ReducedQuotient {
        numerator_form,
        denominator_form,
        value: numerator_form / denominator_form,
    })
}

/// Planar analogue `f(x, nu) = x + 1 + nu (1 - 4(1 - gamma)/(x + nu + (1 - gamma)^2))`.
///
/// `nu` is the eigenvalue of `-d^2/dphi^2` on the mode, so angular wavenumber `m`
/// corresponds to `nu = m^2`.
pub fn f_2d(x: f64, nu: u32, gamma: f64) -> Result<f64> {
    let nu = nu as f64;
    let denom = x + nu + (1.0 - gamma).powi(2);
    if denom == 0.0 {
        return Err(Error::Domain("f_2d is singular at x = nu = 0, gamma = 1".into()));
    }
    Ok(x + 1.0 + nu * (1.0 - 4.0 * (1.0 - gamma) / denom))
}

/// Infimum over the poloidal family. Attained at `lambda = 0`, `nu = 1` when `gamma <= 1`.
pub fn poloidal_infimum(p: &Params) -> Result<f64> {
    require_axisymmetric(p)?;
    let n = p.dim();
    let gamma = p.gamma();
    if gamma <= 1.0 {
        // f_axisym(0, n - 1) in a form free of cancellation near the excluded exponent
        Ok(2.0 * (gamma - 1.0 + n / 2.0).powi(2) / (n - 1.0 + (gamma - n / 2.0).powi(2)))
    } else {
        let (a, b) = inner_coefficients(n, gamma);
        Ok(2.0 + inner_minimum(a, b).1)
    }
}

/// Infimum over the azimuthal family: the lowest eigenvalue `n - 1` at zero frequency.
pub fn azimuthal_infimum(p: &Params) -> Result<f64> {
    require_axisymmetric(p)?;
    Ok(p.dim() - 1.0)
}

/// `1/C - radial term`, the infimum of the constrained angular Rayleigh quotient.
pub fn total_infimum(p: &Params) -> f64 {
    if p.is_planar() {
        let gamma = p.gamma();
        if gamma > 1.0 {
            return 1.0;
        }
        // wavenumbers 0, 1, 2 at x = 0, each rewritten without cancellation:
        // f_2d(0, 0) = 1, f_2d(0, 1) = 2 gamma^2 / (1 + c^2), f_2d(0, 4) = 1 + 4 (c - 2)^2 / (4 + c^2)
        let c = 1.0 - gamma;
        let candidates = [1.0, 2.0 * gamma * gamma / (1.0 + c * c), 1.0 + 4.0 * (c - 2.0).powi(2) / (4.0 + c * c)];
        candidates.into_iter().fold(f64::INFINITY, f64::min)
    } else {
        let poloidal = poloidal_infimum(p).expect("n > 2");
        let azimuthal = azimuthal_infimum(p).expect("n > 2");
        poloidal.min(azimuthal)
    }
}

/// Which reduced family a grid point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeFamily {
    /// Coupled `(w_rho, w_theta)` modes, or the planar `f_2d` family.
    Poloidal,
    /// The decoupled `w_phi` modes, quotient `lambda^2 + alpha_nu`.
    Azimuthal,
}

/// Minimum found by [`brute_force_infimum`] together with where it was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMinimum {
    pub value: f64,
    pub lambda: f64,
    pub nu: u32,
    pub family: ModeFamily,
}

impl GridMinimum {
    fn better_than(&self, other: &GridMinimum) -> bool {
        (self.value, self.lambda, self.nu, self.family as u8)
            < (other.value, other.lambda, other.nu, other.family as u8)
    }
}

/// Exhaustive minimum of the reduced quotients over `lambda in [0, lambda_max]`
/// (`grid` uniform points, endpoints included) and `nu <= nu_max`.
///
/// For `n > 2` both the poloidal quotient ([`mode_quotient`]) and the azimuthal quotient
/// `lambda^2 + alpha_nu` are scanned; for `n = 2` the scan is over `f_2d(lambda^2, m^2)` with
/// the angular wavenumber `m = nu`.
/// Ties are broken toward smaller `lambda`, then smaller `nu`.
pub fn brute_force_infimum(p: &Params, lambda_max: f64, nu_max: u32, grid: usize) -> Result<GridMinimum> {
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::DegenerateGrid(format!("lambda_max must be positive, got {lambda_max}")));
    }
    if nu_max < 2 {
        return Err(Error::DegenerateGrid(format!("nu_max must be at least 2, got {nu_max}")));
    }
    if grid < 100 {
        return Err(Error::DegenerateGrid(format!("need at least 100 lambda points, got {grid}")));
    }

    let n = p.n();
    let step = lambda_max / (grid - 1) as f64;
    let best = (0..grid)
        .into_par_iter()
        .map(|i| {
            let lambda = if i == grid - 1 { lambda_max } else { i as f64 * step };
            scan_frequency(p, n, lambda, nu_max)
        })
        .reduce(
            || GridMinimum { value: f64::INFINITY, lambda: f64::INFINITY, nu: u32::MAX, family: ModeFamily::Azimuthal },
            |a, b| if b.better_than(&a) { b } else { a },
        );
    if best.value.is_finite() {
        Ok(best)
    } else {
        Err(Error::Domain(format!("no finite grid value for {p}")))
    }
}

fn scan_frequency(p: &Params, n: usize, lambda: f64, nu_max: u32) -> GridMinimum {
    let mut best = GridMinimum { value: f64::INFINITY, lambda, nu: u32::MAX, family: ModeFamily::Azimuthal };
    let mut offer = |value: f64, nu: u32, family: ModeFamily| {
        let cand = GridMinimum { value, lambda, nu, family };
        if cand.better_than(&best) {
            best = cand;
        }
    };
    let x = lambda * lambda;
    if p.is_planar() {
        for nu in 0..=nu_max {
            if let Ok(v) = f_2d(x, planar_eigenvalue(nu), p.gamma()) {
                offer(v, nu, ModeFamily::Poloidal);
            }
        }
    } else {
        for nu in 1..=nu_max {
            let point = SpectralPoint { lambda, nu, alpha: eigenvalue(nu, n) };
            // the only failure is the isolated lambda = 0, gamma = n/2 point
            if let Ok(q) = mode_quotient(&point, p) {
                offer(q.value, nu, ModeFamily::Poloidal);
            }
            offer(x + point.alpha, nu, ModeFamily::Azimuthal);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{rel_diff, sharp_constant};

    fn p(n: usize, g: f64) -> Params {
        Params::new(n, g).unwrap()
    }

    #[test]
    fn f_axisym_examples() {
        for g in [-2.0, 0.0, 0.7, 3.0] {
            assert_eq!(f_axisym(0.0, 0.0, &p(3, g)).unwrap(), 0.0);
        }
        let v = f_axisym(1.0, 2.0, &p(3, 0.0)).unwrap();
        assert!((v - (3.0 - 32.0 / 21.0)).abs() < 1e-14);
        let q = mode_quotient(&SpectralPoint { lambda: 1.0, nu: 1, alpha: 2.0 }, &p(3, 0.0)).unwrap();
        assert!(rel_diff(q.value, v) < 1e-14);
    }

    #[test]
    fn f_axisym_singularity() {
        // x = alpha = 0 with gamma = n/2
        assert!(f_axisym(0.0, 0.0, &p(4, 2.0)).is_err());
        assert!(f_axisym(0.0, 0.0, &p(2, 1.0)).is_err());
    }

    #[test]
    fn lowest_mode_identity() {
        for n in 3..=9 {
            for i in 0..=60 {
                let g = -5.0 + 0.1 * i as f64 + 0.001;
                let pp = p(n, g);
                let nf = n as f64;
                let lhs = f_axisym(0.0, nf - 1.0, &pp).unwrap();
                let rhs = 2.0 * (g - 1.0 + nf / 2.0).powi(2) / (nf - 1.0 + (g - nf / 2.0).powi(2));
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-3), "n = {n}, g = {g}");
            }
        }
    }

    #[test]
    fn mode_quotient_examples() {
        let q = mode_quotient(&SpectralPoint::new(0.0, 1, 3).unwrap(), &p(3, 0.0)).unwrap();
        assert!(rel_diff(q.value, 2.0 / 17.0) < 1e-14);
        let q = mode_quotient(&SpectralPoint::new(5.0, 1, 3).unwrap(), &p(3, 0.0)).unwrap();
        assert!(rel_diff(q.value, f_axisym(25.0, 2.0, &p(3, 0.0)).unwrap()) < 1e-13);
        let s = SpectralPoint::new(1.0, 2, 4).unwrap();
        assert_eq!(s.alpha, 8.0);
        let q = mode_quotient(&s, &p(4, 0.5)).unwrap();
        assert!(rel_diff(q.value, f_axisym(1.0, 8.0, &p(4, 0.5)).unwrap()) < 1e-12);
        assert!(q.denominator_form > 0.0);
    }

    #[test]
    fn mode_quotient_rejects_resonance() {
        let s = SpectralPoint::new(0.0, 1, 4).unwrap();
        assert!(mode_quotient(&s, &p(4, 2.0)).is_err());
        assert!(SpectralPoint::new(0.0, 0, 3).is_err());
        assert!(SpectralPoint::new(0.0, 0, 2).is_ok());
    }

    #[test]
    fn f_2d_examples() {
        for (x, g) in [(0.0, 0.5), (2.5, -1.0), (0.3, 3.0)] {
            assert!((f_2d(x, 0, g).unwrap() - (x + 1.0)).abs() < 1e-15);
        }
        assert!(f_2d(0.0, 1, 0.0).unwrap().abs() < 1e-15);
        assert!((f_2d(0.0, 1, -1.0).unwrap() - 0.4).abs() < 1e-15);
        assert!(f_2d(0.0, 0, 1.0).is_err());
    }

    #[test]
    fn poloidal_examples() {
        assert!(rel_diff(poloidal_infimum(&p(3, 0.0)).unwrap(), 2.0 / 17.0) < 1e-14);
        let expected = 2.0 + 4.0 * 2f64.sqrt() - 2.25;
        assert!(rel_diff(poloidal_infimum(&p(3, 2.0)).unwrap(), expected) < 1e-14);
        for n in 3..=10 {
            let nf = n as f64;
            let at_one = 2.0 * (nf / 2.0).powi(2) / (nf - 1.0 + (1.0 - nf / 2.0).powi(2));
            assert!((at_one - 2.0).abs() < 1e-14);
            assert!((poloidal_infimum(&p(n, 1.0)).unwrap() - at_one).abs() < 1e-13);
            let (a, b) = inner_coefficients(nf, 1.0);
            assert!((2.0 + inner_minimum(a, b).1 - at_one).abs() < 1e-13);
        }
        assert!(poloidal_infimum(&p(2, 0.5)).is_err());
    }

    #[test]
    fn azimuthal_examples() {
        assert_eq!(azimuthal_infimum(&p(3, 0.0)).unwrap(), 2.0);
        assert_eq!(azimuthal_infimum(&p(4, 0.0)).unwrap(), 3.0);
        assert_eq!(azimuthal_infimum(&p(10, 0.0)).unwrap(), 9.0);
    }

    #[test]
    fn total_examples() {
        let t = total_infimum(&p(3, 0.0));
        let b = sharp_constant(&p(3, 0.0));
        assert!(rel_diff(t, b.c_inverse - 0.25) < 1e-13);
        assert!(rel_diff(t, 2.0 / 17.0) < 1e-14);
        assert_eq!(total_infimum(&p(2, 1.5)), 1.0);
        assert!(rel_diff(total_infimum(&p(2, -1.0)), 0.4) < 1e-14);
        assert_eq!(total_infimum(&p(3, 2.0)), 2.0);
    }

    #[test]
    fn total_matches_constant_decomposition() {
        for n in 2..=12 {
            for i in 0..=200 {
                let g = -5.0 + 0.05 * i as f64 + 0.0021;
                let pp = p(n, g);
                let b = sharp_constant(&pp);
                let lhs = b.c_inverse;
                let rhs = pp.radial_term() + total_infimum(&pp);
                assert!(rel_diff(lhs, rhs) < 1e-12, "n = {n}, g = {g}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn brute_force_examples() {
        let m = brute_force_infimum(&p(3, 0.0), 10.0, 20, 1000).unwrap();
        assert!((m.value - total_infimum(&p(3, 0.0))).abs() < 1e-10);
        assert_eq!((m.lambda, m.nu, m.family), (0.0, 1, ModeFamily::Poloidal));
        let m = brute_force_infimum(&p(2, -1.0), 10.0, 20, 1000).unwrap();
        assert!((m.value - 0.4).abs() < 1e-10);
        assert_eq!(m.nu, 1);
        let m = brute_force_infimum(&p(4, 1.2), 10.0, 20, 1000).unwrap();
        assert!(rel_diff(m.value, total_infimum(&p(4, 1.2))) < 1e-6);
        let m = brute_force_infimum(&p(3, 2.0), 10.0, 20, 1000).unwrap();
        assert_eq!(m.family, ModeFamily::Azimuthal);
        assert_eq!(m.value, 2.0);
    }

    #[test]
    fn brute_force_rejects_degenerate_grids() {
        let pp = p(3, 0.0);
        assert!(brute_force_infimum(&pp, 0.0, 20, 1000).is_err());
        assert!(brute_force_infimum(&pp, 10.0, 1, 1000).is_err());
        assert!(brute_force_infimum(&pp, 10.0, 20, 99).is_err());
    }

    #[test]
    fn monotone_in_alpha_below_gamma_one() {
        for n in 3..=8 {
            for i in 0..=40 {
                let g = -4.0 + 0.125 * i as f64 + 0.003;
                let pp = p(n, g);
                let nf = n as f64;
                let bound = 1.0 - (1.0 - g) / ((nf - 1.0) * (nf - 2.0 * g));
                assert!(bound > 0.0);
                let mut prev = f_axisym(0.0, eigenvalue(1, n), &pp).unwrap();
                for nu in 2..=30 {
                    let cur = f_axisym(0.0, eigenvalue(nu, n), &pp).unwrap();
                    assert!(cur > prev, "n = {n}, g = {g}, nu = {nu}");
                    prev = cur;
                }
                // the derivative stays positive on the whole half-line alpha >= n - 1
                let k2 = (nf - 2.0 * g).powi(2);
                for j in 0..200 {
                    let a = nf - 1.0 + 0.25 * j as f64;
                    let deriv = 1.0 - 16.0 * (1.0 - g) * k2 / (4.0 * a + k2).powi(2);
                    let h = 1e-5;
                    let fd = (f_axisym(0.0, a + h, &pp).unwrap() - f_axisym(0.0, a - h, &pp).unwrap()) / (2.0 * h);
                    assert!((deriv - fd).abs() < 1e-7);
                    assert!(deriv > 0.0, "n = {n}, g = {g}, alpha = {a}");
                }
            }
        }
    }

    #[test]
    fn monotone_in_alpha_above_gamma_one() {
        for n in 3..=8 {
            for g in [1.01, 1.5, 2.0, 3.7, 8.0] {
                let pp = p(n, g);
                for i in 0..=50 {
                    let x = 0.2 * i as f64;
                    let mut prev = f_axisym(x, 0.25, &pp).unwrap();
                    for k in 1..=40 {
                        let cur = f_axisym(x, 0.25 + 0.5 * k as f64, &pp).unwrap();
                        assert!(cur > prev);
                        prev = cur;
                    }
                }
            }
        }
    }

    #[test]
    fn poloidal_dominated_by_azimuthal_below_gamma_one() {
        for n in 3..=12 {
            for i in 0..60 {
                let g = -5.0 + 0.1 * i as f64 + 0.0007;
                let pp = p(n, g);
                assert!(poloidal_infimum(&pp).unwrap() <= azimuthal_infimum(&pp).unwrap() + 1e-14);
            }
        }
    }

    #[test]
    fn stable_forms_match_definitions() {
        for i in 0..200 {
            let g = -5.0 + 0.05 * i as f64 + 0.0013;
            let c = 1.0 - g;
            let f1 = 2.0 * g * g / (1.0 + c * c);
            assert!((f_2d(0.0, 1, g).unwrap() - f1).abs() < 1e-13);
            let f4 = 1.0 + 4.0 * (c - 2.0).powi(2) / (4.0 + c * c);
            assert!((f_2d(0.0, 4, g).unwrap() - f4).abs() < 1e-13);
            for n in 3..=9 {
                if g > 1.0 || g == 1.0 - n as f64 / 2.0 {
                    continue;
                }
                let pp = p(n, g);
                let direct = f_axisym(0.0, n as f64 - 1.0, &pp).unwrap();
                assert!((poloidal_infimum(&pp).unwrap() - direct).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn planar_nu_comparison() {
        let r3 = 3f64.sqrt();
        for i in 0..=400 {
            let g = -6.0 + 0.02 * i as f64 + 1e-4;
            if g > 1.0 || g == 0.0 {
                continue;
            }
            let f0 = 1.0;
            let f1 = f_2d(0.0, 1, g).unwrap();
            let f2 = f_2d(0.0, 4, g).unwrap();
            if (-r3 - 1.0..=r3 - 1.0).contains(&g) {
                assert!(f0 >= f1 && f2 >= f1, "g = {g}");
            } else {
                assert!(f1 >= f0 && f2 >= f0, "g = {g}");
            }
        }
    }
}
