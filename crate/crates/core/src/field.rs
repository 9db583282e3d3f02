//! Axisymmetric fields after the substitution `v = u |x|^(gamma - 1 + n/2)`,
//! sampled on a [`LogRadialGrid`], and their Fourier transforms in `t`.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::TAxis;
use crate::grid::LogRadialGrid;
use crate::operators::{pole_quotient, theta_divergence, DEFAULT_POLE_BOUND};
use crate::params::Params;

/// Largest boundary-to-peak ratio accepted as compact support.
pub const DEFAULT_DECAY_TOL: f64 = 1e-8;

/// Reduced field `(v_rho, v_theta, v_phi)` on a `nt x n_theta` grid, row-major in `t`.
#[derive(Debug, Clone)]
pub struct AxisymFieldV {
    grid: LogRadialGrid,
    params: Params,
    v_rho: Vec<f64>,
    v_theta: Vec<f64>,
    v_phi: Vec<f64>,
}

impl AxisymFieldV {
    /// Checks shapes, that `v_theta` and `v_phi` vanish at the poles and that every
    /// component decays below [`DEFAULT_DECAY_TOL`] at both ends of the `t` window.
    pub fn new(grid: LogRadialGrid, params: Params, v_rho: Vec<f64>, v_theta: Vec<f64>, v_phi: Vec<f64>) -> Result<Self> {
        let field = Self::unchecked(grid, params, v_rho, v_theta, v_phi)?;
        field.check_poles()?;
        let decay = field.boundary_decay();
        if decay > DEFAULT_DECAY_TOL {
            return Err(Error::GridTooNarrow { decay });
        }
        Ok(field)
    }

    /// Shape checks only.
    pub fn unchecked(grid: LogRadialGrid, params: Params, v_rho: Vec<f64>, v_theta: Vec<f64>, v_phi: Vec<f64>) -> Result<Self> {
        if params.n() != grid.n() {
            return Err(Error::InvalidArgument(format!(
                "grid is built for n = {}, params have n = {}",
                grid.n(),
                params.n()
            )));
        }
        let len = grid.len();
        for (name, a) in [("v_rho", &v_rho), ("v_theta", &v_theta), ("v_phi", &v_phi)] {
            if a.len() != len {
                return Err(Error::InvalidArgument(format!("{name} has {} samples, grid has {len}", a.len())));
            }
            if a.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} has non-finite samples")));
            }
        }
        Ok(Self { grid, params, v_rho, v_theta, v_phi })
    }

    fn check_poles(&self) -> Result<()> {
        for a in [&self.v_theta, &self.v_phi] {
            let g = pole_quotient(a, self.grid.theta())?;
            let peak = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let gmax = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            // a smooth profile vanishing at the poles keeps f / sin theta comparable to f'
            let slope = crate::operators::smooth_derivative(a, self.grid.theta())?
                .iter()
                .fold(0.0f64, |m, x| m.max(x.abs()));
            if gmax > DEFAULT_POLE_BOUND * peak.max(slope) {
                return Err(Error::PoleSingularity(format!(
                    "tangential component does not vanish at the poles (|f / sin| = {gmax:.3e})"
                )));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &LogRadialGrid {
        &self.grid
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma()
    }

    pub fn v_rho(&self) -> &[f64] {
        &self.v_rho
    }

    pub fn v_theta(&self) -> &[f64] {
        &self.v_theta
    }

    pub fn v_phi(&self) -> &[f64] {
        &self.v_phi
    }

    /// Largest magnitude on the first and last `t` rows relative to the largest overall.
    pub fn boundary_decay(&self) -> f64 {
        let m = self.grid.n_theta();
        let nt = self.grid.nt();
        let mut edge = 0.0f64;
        let mut peak = 0.0f64;
        for a in [&self.v_rho, &self.v_theta, &self.v_phi] {
            for (k, x) in a.iter().enumerate() {
                let i = k / m;
                peak = peak.max(x.abs());
                if i == 0 || i == nt - 1 {
                    edge = edge.max(x.abs());
                }
            }
        }
        if peak == 0.0 {
            0.0
        } else {
            edge / peak
        }
    }

    /// Multiplies every component by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let s = |a: &[f64]| a.iter().map(|x| x * c).collect();
        Self {
            grid: self.grid.clone(),
            params: self.params,
            v_rho: s(&self.v_rho),
            v_theta: s(&self.v_theta),
            v_phi: s(&self.v_phi),
        }
    }

    /// Fourier transform in `t` of all three components.
    pub fn to_spectral(&self) -> SpectralField {
        let axis = self.grid.t_axis();
        let m = self.grid.n_theta();
        SpectralField {
            grid: self.grid.clone(),
            w_rho: axis.forward(&self.v_rho, m),
            w_theta: axis.forward(&self.v_theta, m),
            w_phi: axis.forward(&self.v_phi, m),
            lambdas: axis.lambdas(),
        }
    }

    /// Writes `t, theta, v_rho, v_theta, v_phi` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "theta", "v_rho", "v_theta", "v_phi"])?;
        let m = self.grid.n_theta();
        for i in 0..self.grid.nt() {
            let t = self.grid.t(i);
            for (j, th) in self.grid.theta_nodes().iter().enumerate() {
                let k = i * m + j;
                w.serialize((t, th, self.v_rho[k], self.v_theta[k], self.v_phi[k]))?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Fourier transform `w(lambda, theta)` of an [`AxisymFieldV`], rows in FFT frequency order.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub grid: LogRadialGrid,
    pub w_rho: Vec<Complex64>,
    pub w_theta: Vec<Complex64>,
    pub w_phi: Vec<Complex64>,
    pub lambdas: Vec<f64>,
}

impl SpectralField {
    /// Largest violation of `w(-lambda) = conj(w(lambda))`, relative to the largest entry.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let nt = self.grid.nt();
        let m = self.grid.n_theta();
        let mut worst = 0.0f64;
        let mut peak = 0.0f64;
        for w in [&self.w_rho, &self.w_theta, &self.w_phi] {
            for k in 1..nt {
                let kk = nt - k;
                for j in 0..m {
                    let a = w[k * m + j];
                    peak = peak.max(a.norm());
                    worst = worst.max((a - w[kk * m + j].conj()).norm());
                }
            }
        }
        if peak == 0.0 {
            0.0
        } else {
            worst / peak
        }
    }
}

/// Pointwise residual `d_t v_rho + (n/2 - gamma) v_rho + Dcal v_theta` of the divergence constraint.
pub fn divergence_residual(v: &AxisymFieldV) -> Result<Vec<f64>> {
    let grid = v.grid();
    let m = grid.n_theta();
    let c = v.params().shift();
    let dt = grid.t_axis().derivative(v.v_rho(), m);
    let div = theta_divergence(v.v_theta(), grid.theta())?;
    Ok((0..grid.len()).map(|k| dt[k] + c * v.v_rho()[k] + div[k]).collect())
}

/// Radial component making `(v_rho, v_theta)` divergence free:
/// `w_rho = -Dcal w_theta / (i lambda + n/2 - gamma)` per frequency.
pub fn solve_radial_component(v_theta: &[f64], grid: &LogRadialGrid, params: &Params) -> Result<Vec<f64>> {
    let div = theta_divergence(v_theta, grid.theta())?;
    solve_transport(&div, grid.n_theta(), grid.t_axis(), params.shift())
}

/// Solves `(d_t + c) v = -f` column by column in frequency space.
///
/// For `c = 0` the zero mode of `f` must vanish; the free constant in `v` is then fixed by
/// making `v` vanish on the first `t` row.
pub fn solve_transport(f: &[f64], m: usize, axis: &TAxis, c: f64) -> Result<Vec<f64>> {
    let mut w = axis.forward(f, m);
    let symbol = axis.derivative_symbol();
    let scale = w.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    for (k, row) in w.chunks_exact_mut(m).enumerate() {
        let denom = Complex64::new(c, symbol[k]);
        if denom.norm() == 0.0 {
            let mean = row.iter().fold(0.0f64, |a, z| a.max(z.norm()));
            if mean > 1e-12 * scale {
                return Err(Error::ZeroFrequencyResonance { mean });
            }
            row.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        } else {
            row.iter_mut().for_each(|z| *z = -*z / denom);
        }
    }
    let mut v = axis.inverse(&w, m);
    if c == 0.0 {
        let edge: Vec<f64> = v[..m].to_vec();
        for row in v.chunks_exact_mut(m) {
            row.iter_mut().zip(&edge).for_each(|(x, e)| *x -= e);
        }
    }
    Ok(v)
}
