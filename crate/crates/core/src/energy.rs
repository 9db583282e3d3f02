//! Weighted energies of reduced fields and their Rayleigh quotient.
//!
//! With `t = log rho`, `int |grad v|^2 / |x|^(n-2) dx` and `int |v|^2 / |x|^n dx` both become
//! `|S^(n-2)| int int (...) sin^(n-2) d theta dt`. The gradient energy is evaluated three ways:
//! pointwise in `t`, per frequency from all three transformed components, and per frequency
//! from `w_theta` and `w_phi` alone after eliminating `w_rho` through the constraint.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{AxisymFieldV, SpectralField};
use crate::grid::{LogRadialGrid, ThetaGrid};
use crate::operators::{pole_derivative, pole_quotient, smooth_derivative, theta_divergence};
use crate::params::Params;
use crate::spectral::total_infimum;

/// Outcome of one quotient evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub numerator: f64,
    pub denominator: f64,
    pub value: f64,
    pub target: f64,
}

impl QuotientReport {
    pub fn new(numerator: f64, denominator: f64, target: f64) -> Result<Self> {
        if !(denominator > 0.0) {
            return Err(Error::ZeroField);
        }
        Ok(Self { numerator, denominator, value: numerator / denominator, target })
    }

    /// `value / target - 1`.
    pub fn relative_gap(&self) -> f64 {
        self.value / self.target - 1.0
    }

    /// Whether `value >= target (1 - eps)`.
    pub fn respects(&self, eps: f64) -> bool {
        self.value >= self.target * (1.0 - eps)
    }
}

/// `int |grad v|^2 / |x|^(n-2) dx` from the pointwise expansion of `rho^2 |grad v|^2`.
pub fn gradient_energy(v: &AxisymFieldV) -> Result<f64> {
    let grid = v.grid();
    let th = grid.theta();
    let m = grid.n_theta();
    let n = grid.n() as f64;
    let axis = grid.t_axis();
    let (vr, vt, vp) = (v.v_rho(), v.v_theta(), v.v_phi());

    let dt_r = axis.derivative(vr, m);
    let dt_t = axis.derivative(vt, m);
    let dt_p = axis.derivative(vp, m);
    let dth_r = smooth_derivative(vr, th)?;
    let dth_t = pole_derivative(vt, th)?;
    let dth_p = pole_derivative(vp, th)?;
    let div_t = theta_divergence(vt, th)?;
    let g_t = pole_quotient(vt, th)?;
    let g_p = pole_quotient(vp, th)?;
    let cos = th.cos();

    let density: Vec<f64> = (0..grid.len())
        .map(|k| {
            let cot_vt = cos[k % m] * g_t[k];
            dt_r[k].powi(2)
                + dt_t[k].powi(2)
                + dth_r[k].powi(2)
                + dth_t[k].powi(2)
                + vt[k].powi(2)
                + (n - 1.0) * vr[k].powi(2)
                + (n - 2.0) * cot_vt.powi(2)
                + 2.0 * (vr[k] * div_t[k] - vt[k] * dth_r[k])
                + dt_p[k].powi(2)
                + dth_p[k].powi(2)
                + (n - 2.0) * g_p[k].powi(2)
        })
        .collect();
    Ok(grid.integrate(&density))
}

/// `int |v|^2 / |x|^n dx` in `t`-space.
pub fn weight_energy(v: &AxisymFieldV) -> f64 {
    let (vr, vt, vp) = (v.v_rho(), v.v_theta(), v.v_phi());
    let density: Vec<f64> = (0..vr.len()).map(|k| vr[k].powi(2) + vt[k].powi(2) + vp[k].powi(2)).collect();
    v.grid().integrate(&density)
}

/// Frequency-side counterpart of [`weight_energy`].
pub fn spectral_weight_energy(w: &SpectralField) -> f64 {
    let density: Vec<f64> = (0..w.w_rho.len())
        .map(|k| w.w_rho[k].norm_sqr() + w.w_theta[k].norm_sqr() + w.w_phi[k].norm_sqr())
        .collect();
    integrate_lambda(&w.grid, &density)
}

/// Both sides of the Plancherel identity for the weight energy.
pub fn plancherel_sides(v: &AxisymFieldV) -> (f64, f64) {
    (weight_energy(v), spectral_weight_energy(&v.to_spectral()))
}

fn integrate_lambda(grid: &LogRadialGrid, density: &[f64]) -> f64 {
    let m = grid.n_theta();
    let w = grid.theta_weights();
    let s: f64 = density.chunks_exact(m).map(|row| row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>()).sum();
    s * grid.t_axis().d_lambda() * grid.solid_angle()
}

/// Applies a real operator to the real and imaginary parts of a complex batch.
fn complex_apply(w: &[Complex64], th: &ThetaGrid, op: impl Fn(&[f64], &ThetaGrid) -> Result<Vec<f64>>) -> Result<Vec<Complex64>> {
    let re: Vec<f64> = w.iter().map(|z| z.re).collect();
    let im: Vec<f64> = w.iter().map(|z| z.im).collect();
    let (a, b) = (op(&re, th)?, op(&im, th)?);
    Ok(a.into_iter().zip(b).map(|(x, y)| Complex64::new(x, y)).collect())
}

/// Azimuthal density `lambda^2 |w_phi|^2 + |d_theta w_phi|^2 + (n-2) |w_phi / sin|^2`.
fn azimuthal_density(w: &SpectralField) -> Result<Vec<f64>> {
    let th = w.grid.theta();
    let m = th.len();
    let n = th.n() as f64;
    let d = complex_apply(&w.w_phi, th, pole_derivative)?;
    let g = complex_apply(&w.w_phi, th, pole_quotient)?;
    Ok((0..w.w_phi.len())
        .map(|k| {
            let l2 = w.lambdas[k / m].powi(2);
            l2 * w.w_phi[k].norm_sqr() + d[k].norm_sqr() + (n - 2.0) * g[k].norm_sqr()
        })
        .collect())
}

/// Gradient energy per frequency from `(w_rho, w_theta, w_phi)`, valid for any field.
pub fn spectral_gradient_energy(w: &SpectralField) -> Result<f64> {
    let th = w.grid.theta();
    let m = th.len();
    let n = th.n() as f64;
    let d_r = complex_apply(&w.w_rho, th, smooth_derivative)?;
    let d_t = complex_apply(&w.w_theta, th, pole_derivative)?;
    let g_t = complex_apply(&w.w_theta, th, pole_quotient)?;
    let div_t = complex_apply(&w.w_theta, th, theta_divergence)?;
    let az = azimuthal_density(w)?;
    let density: Vec<f64> = (0..w.w_rho.len())
        .map(|k| {
            let l2 = w.lambdas[k / m].powi(2);
            (l2 + n - 1.0) * w.w_rho[k].norm_sqr()
                + (l2 - n + 3.0) * w.w_theta[k].norm_sqr()
                + d_r[k].norm_sqr()
                + d_t[k].norm_sqr()
                + (n - 2.0) * g_t[k].norm_sqr()
                + 4.0 * (w.w_rho[k].conj() * div_t[k]).re
                + az[k]
        })
        .collect();
    Ok(integrate_lambda(&w.grid, &density))
}

/// Gradient energy per frequency from `w_theta` and `w_phi` only, with `w_rho` eliminated
/// through the divergence constraint. Valid for divergence-free fields.
pub fn reduced_gradient_energy(w: &SpectralField, params: &Params) -> Result<f64> {
    let th = w.grid.theta();
    let m = th.len();
    let n = th.n() as f64;
    let c = params.shift();
    let d_t = complex_apply(&w.w_theta, th, pole_derivative)?;
    let g_t = complex_apply(&w.w_theta, th, pole_quotient)?;
    let div_t = complex_apply(&w.w_theta, th, theta_divergence)?;
    let d_div = complex_apply(&div_t, th, smooth_derivative)?;
    let az = azimuthal_density(w)?;
    let scale = div_t.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let rho0 = if c == 0.0 { Some(resonant_radial_mode(w, &div_t)?) } else { None };
    let mut density = Vec::with_capacity(w.w_theta.len());
    for k in 0..w.w_theta.len() {
        let l2 = w.lambdas[k / m].powi(2);
        let big_l = l2 + c * c;
        let constrained = if big_l == 0.0 {
            if div_t[k].norm() > 1e-12 * scale {
                return Err(Error::ZeroFrequencyResonance { mean: div_t[k].norm() });
            }
            let (r, dr) = rho0.as_ref().expect("c = 0");
            (n - 1.0) * r[k].norm_sqr() + dr[k].norm_sqr()
        } else {
            ((l2 + n - 1.0) * div_t[k].norm_sqr() + d_div[k].norm_sqr() - 4.0 * c * div_t[k].norm_sqr()) / big_l
        };
        density.push(
            constrained
                + (l2 - n + 3.0) * w.w_theta[k].norm_sqr()
                + d_t[k].norm_sqr()
                + (n - 2.0) * g_t[k].norm_sqr()
                + az[k],
        );
    }
    Ok(integrate_lambda(&w.grid, &density))
}

/// `w_rho(0)` and its `theta` derivative when `n/2 = gamma`, where the constraint leaves the
/// zero mode undetermined. Decay in `t` fixes it to the limit `i d/dlambda (Dcal w_theta)` at 0,
/// i.e. the first moment of `Dcal v_theta` over `sqrt(2 pi)`.
fn resonant_radial_mode(w: &SpectralField, div_t: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let grid = &w.grid;
    let m = grid.n_theta();
    let axis = grid.t_axis();
    let f = axis.inverse(div_t, m);
    let scale = grid.dt() / (2.0 * std::f64::consts::PI).sqrt();
    let mut r = vec![0.0; m];
    for (i, row) in f.chunks_exact(m).enumerate() {
        let t = grid.t(i);
        r.iter_mut().zip(row).for_each(|(a, x)| *a += t * x * scale);
    }
    let dr = smooth_derivative(&r, grid.theta())?;
    let mut rc = vec![Complex64::new(0.0, 0.0); div_t.len()];
    let mut drc = rc.clone();
    for j in 0..m {
        rc[j] = Complex64::new(r[j], 0.0);
        drc[j] = Complex64::new(dr[j], 0.0);
    }
    Ok((rc, drc))
}

/// `gradient_energy / weight_energy` against the target `1/C - (n/2 + gamma - 1)^2`.
pub fn rayleigh_quotient(v: &AxisymFieldV) -> Result<QuotientReport> {
    let den = weight_energy(v);
    if den == 0.0 {
        return Err(Error::ZeroField);
    }
    QuotientReport::new(gradient_energy(v)?, den, total_infimum(v.params()))
}
