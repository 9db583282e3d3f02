//! Planar fields, in reduced polar form `v(t, phi)` and as Cartesian stream functions.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constants::sharp_constant;
use crate::energy::QuotientReport;
use crate::error::{Error, Result};
use crate::field::{solve_transport, DEFAULT_DECAY_TOL};
use crate::fourier::TAxis;
use crate::params::Params;
use crate::spectral::total_infimum;

/// Uniform periodic grid in `t = log rho` and in the polar angle `phi`.
#[derive(Debug, Clone)]
pub struct PolarGrid {
    t_min: f64,
    t_max: f64,
    t_axis: TAxis,
    phi_axis: TAxis,
}

impl PolarGrid {
    pub fn new(t_min: f64, t_max: f64, nt: usize, n_phi: usize) -> Result<Self> {
        if !nt.is_power_of_two() || nt < 8 {
            return Err(Error::DegenerateGrid(format!("nt must be a power of two >= 8, got {nt}")));
        }
        if n_phi < 4 {
            return Err(Error::DegenerateGrid(format!("need at least 4 phi samples, got {n_phi}")));
        }
        if !(t_max > t_min) || !t_min.is_finite() || !t_max.is_finite() {
            return Err(Error::DegenerateGrid(format!("empty t range [{t_min}, {t_max}]")));
        }
        Ok(Self {
            t_min,
            t_max,
            t_axis: TAxis::new(nt, (t_max - t_min) / nt as f64, t_min),
            phi_axis: TAxis::new(n_phi, 2.0 * PI / n_phi as f64, 0.0),
        })
    }

    pub fn nt(&self) -> usize {
        self.t_axis.nt()
    }

    pub fn n_phi(&self) -> usize {
        self.phi_axis.nt()
    }

    pub fn len(&self) -> usize {
        self.nt() * self.n_phi()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / self.nt() as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t_min + i as f64 * self.dt()
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_phi() as f64
    }

    pub fn t_axis(&self) -> &TAxis {
        &self.t_axis
    }

    fn integrate(&self, a: &[f64]) -> f64 {
        a.iter().sum::<f64>() * self.dt() * 2.0 * PI / self.n_phi() as f64
    }

    /// Spectral `d/dphi` of a row-major `nt x n_phi` array.
    pub fn phi_derivative(&self, a: &[f64]) -> Vec<f64> {
        let (nt, np) = (self.nt(), self.n_phi());
        let at = transpose(a, nt, np);
        transpose(&self.phi_axis.derivative(&at, nt), np, nt)
    }
}

fn transpose(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    for i in 0..rows {
        for j in 0..cols {
            out[j * rows + i] = a[i * cols + j];
        }
    }
    out
}

/// Reduced planar field `(v_rho, v_phi)` with `v = u |x|^gamma`, row-major `nt x n_phi`.
#[derive(Debug, Clone)]
pub struct PolarField2D {
    grid: PolarGrid,
    params: Params,
    v_rho: Vec<f64>,
    v_phi: Vec<f64>,
}

impl PolarField2D {
    pub fn new(grid: PolarGrid, params: Params, v_rho: Vec<f64>, v_phi: Vec<f64>) -> Result<Self> {
        if !params.is_planar() {
            return Err(Error::InvalidDimension(params.n()));
        }
        if v_rho.len() != grid.len() || v_phi.len() != grid.len() {
            return Err(Error::InvalidArgument("component length does not match the polar grid".into()));
        }
        let field = Self { grid, params, v_rho, v_phi };
        let decay = field.boundary_decay();
        if decay > DEFAULT_DECAY_TOL {
            return Err(Error::GridTooNarrow { decay });
        }
        Ok(field)
    }

    /// Builds the divergence-free field with the given `v_phi`, solving
    /// `d_t v_rho + (1 - gamma) v_rho + d_phi v_phi = 0` for `v_rho`.
    pub fn from_azimuthal(grid: PolarGrid, params: Params, v_phi: Vec<f64>) -> Result<Self> {
        if v_phi.len() != grid.len() {
            return Err(Error::InvalidArgument("v_phi length does not match the polar grid".into()));
        }
        let f = grid.phi_derivative(&v_phi);
        let v_rho = solve_transport(&f, grid.n_phi(), grid.t_axis(), params.shift())?;
        Self::new(grid, params, v_rho, v_phi)
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn v_rho(&self) -> &[f64] {
        &self.v_rho
    }

    pub fn v_phi(&self) -> &[f64] {
        &self.v_phi
    }

    pub fn boundary_decay(&self) -> f64 {
        let m = self.grid.n_phi();
        let last = self.grid.len() - m;
        let mut edge = 0.0f64;
        let mut peak = 0.0f64;
        for a in [&self.v_rho, &self.v_phi] {
            for (k, x) in a.iter().enumerate() {
                peak = peak.max(x.abs());
                if k < m || k >= last {
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

    /// Pointwise `d_t v_rho + (1 - gamma) v_rho + d_phi v_phi`.
    pub fn divergence_residual(&self) -> Vec<f64> {
        let m = self.grid.n_phi();
        let dt = self.grid.t_axis().derivative(&self.v_rho, m);
        let dp = self.grid.phi_derivative(&self.v_phi);
        let c = self.params.shift();
        (0..self.v_rho.len()).map(|k| dt[k] + c * self.v_rho[k] + dp[k]).collect()
    }

    /// `int |grad v|^2 dx` with `rho^2 |grad v|^2 = (d_t v_rho)^2 + (d_t v_phi)^2
    /// + (d_phi v_rho - v_phi)^2 + (d_phi v_phi + v_rho)^2`.
    pub fn gradient_energy(&self) -> f64 {
        let m = self.grid.n_phi();
        let axis = self.grid.t_axis();
        let (vr, vp) = (&self.v_rho, &self.v_phi);
        let tr = axis.derivative(vr, m);
        let tp = axis.derivative(vp, m);
        let pr = self.grid.phi_derivative(vr);
        let pp = self.grid.phi_derivative(vp);
        let density: Vec<f64> = (0..vr.len())
            .map(|k| tr[k].powi(2) + tp[k].powi(2) + (pr[k] - vp[k]).powi(2) + (pp[k] + vr[k]).powi(2))
            .collect();
        self.grid.integrate(&density)
    }

    /// `int |v|^2 / |x|^2 dx`.
    pub fn weight_energy(&self) -> f64 {
        let density: Vec<f64> = self.v_rho.iter().zip(&self.v_phi).map(|(a, b)| a * a + b * b).collect();
        self.grid.integrate(&density)
    }

    /// Quotient against `1/C - gamma^2`.
    pub fn rayleigh_quotient(&self) -> Result<QuotientReport> {
        QuotientReport::new(self.gradient_energy(), self.weight_energy(), total_infimum(&self.params))
    }
}

/// Stream function `psi` sampled at the cell centers of `[-L, L]^2`, row index along `x_1`.
///
/// The velocity is `u = (d psi / d x_2, -d psi / d x_1)`. No sample sits at the origin.
#[derive(Debug, Clone)]
pub struct StreamField2D {
    psi: Vec<f64>,
    size: usize,
    spacing: f64,
    gamma: f64,
}

/// Width of the zero margin, in cells, that every stream function must carry.
pub const STREAM_MARGIN: usize = 3;

impl StreamField2D {
    pub fn new(psi: Vec<f64>, size: usize, spacing: f64, gamma: f64) -> Result<Self> {
        if size < 4 * STREAM_MARGIN || psi.len() != size * size {
            return Err(Error::DegenerateGrid(format!("stream function needs a square grid of side >= {}", 4 * STREAM_MARGIN)));
        }
        if !(spacing > 0.0) {
            return Err(Error::DegenerateGrid(format!("spacing must be positive, got {spacing}")));
        }
        let peak = psi.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for i in 0..size {
            for j in 0..size {
                let inner = (STREAM_MARGIN..size - STREAM_MARGIN).contains(&i) && (STREAM_MARGIN..size - STREAM_MARGIN).contains(&j);
                if !inner && psi[i * size + j].abs() > 1e-14 * peak {
                    return Err(Error::Domain("stream function is not supported inside the grid".into()));
                }
            }
        }
        Ok(Self { psi, size, spacing, gamma })
    }

    /// Samples `psi(x_1, x_2)` on `size x size` cell centers of `[-half_width, half_width]^2`.
    pub fn from_fn(size: usize, half_width: f64, gamma: f64, psi: impl Fn(f64, f64) -> f64 + Sync) -> Result<Self> {
        let h = 2.0 * half_width / size as f64;
        let data: Vec<f64> = (0..size * size)
            .into_par_iter()
            .map(|k| psi(-half_width + (k / size) as f64 * h + 0.5 * h, -half_width + (k % size) as f64 * h + 0.5 * h))
            .collect();
        Self::new(data, size, h, gamma)
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 + 0.5 - self.size as f64 / 2.0) * self.spacing
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.psi[i * self.size + j]
    }

    /// Multiplies `psi` by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { psi: self.psi.iter().map(|x| x * c).collect(), ..self.clone() }
    }

    /// Largest `|grad psi|` on the four cells around the origin, relative to the largest overall.
    pub fn origin_gradient(&self) -> f64 {
        let (gx, gy) = self.gradient();
        let norm = |k: usize| (gx[k] * gx[k] + gy[k] * gy[k]).sqrt();
        let peak = (0..gx.len()).map(norm).fold(0.0, f64::max);
        let c = self.size / 2;
        let near = [(c - 1, c - 1), (c - 1, c), (c, c - 1), (c, c)]
            .iter()
            .map(|&(i, j)| norm(i * self.size + j))
            .fold(0.0, f64::max);
        if peak == 0.0 {
            0.0
        } else {
            near / peak
        }
    }

    /// Centered-difference `(d psi / d x_1, d psi / d x_2)`, zero on the outermost ring.
    pub fn gradient(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.size;
        let h2 = 2.0 * self.spacing;
        let mut gx = vec![0.0; n * n];
        let mut gy = vec![0.0; n * n];
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                gx[i * n + j] = (self.at(i + 1, j) - self.at(i - 1, j)) / h2;
                gy[i * n + j] = (self.at(i, j + 1) - self.at(i, j - 1)) / h2;
            }
        }
        (gx, gy)
    }

    /// `1/C_{2,gamma}`; fails for the excluded exponent.
    pub fn target(&self) -> Result<f64> {
        Ok(sharp_constant(&Params::new(2, self.gamma)?).c_inverse)
    }

    fn weights(&self, i: usize, j: usize) -> (f64, f64) {
        let r2 = self.coord(i).powi(2) + self.coord(j).powi(2);
        (r2.powf(self.gamma - 1.0), r2.powf(self.gamma))
    }
}

/// Sums `(int |x|^(2g-2) |u|^2, int |x|^(2g) |grad u|^2)` over cells `2..n-2` of a
/// sampled stream function whose cell `i` sits at `(i + 1/2 - n/2) h`, keeping cells
/// for which `include(x_1, x_2)` holds. Derivatives of `u` are centered differences of
/// the centered-difference velocity.
fn vector_route_sums(psi: &[f64], n: usize, h: f64, gamma: f64, include: &(dyn Fn(f64, f64) -> bool + Sync)) -> (f64, f64) {
    let coord = |i: usize| (i as f64 + 0.5 - n as f64 / 2.0) * h;
    let h2 = 2.0 * h;
    let p = |i: usize, j: usize| psi[i * n + j];
    // u = (d2 psi, -d1 psi)
    let u = |i: usize, j: usize| ((p(i, j + 1) - p(i, j - 1)) / h2, -(p(i + 1, j) - p(i - 1, j)) / h2);
    let (lhs, rhs) = (2..n - 2)
        .into_par_iter()
        .map(|i| {
            let mut lhs = 0.0;
            let mut rhs = 0.0;
            for j in 2..n - 2 {
                let (x, y) = (coord(i), coord(j));
                if !include(x, y) {
                    continue;
                }
                let r2 = x * x + y * y;
                let (u1, u2) = u(i, j);
                lhs += r2.powf(gamma - 1.0) * (u1 * u1 + u2 * u2);
                let (a1, a2) = u(i + 1, j);
                let (b1, b2) = u(i - 1, j);
                let (c1, c2) = u(i, j + 1);
                let (d1, d2) = u(i, j - 1);
                let g = ((a1 - b1) / h2).powi(2) + ((a2 - b2) / h2).powi(2) + ((c1 - d1) / h2).powi(2) + ((c2 - d2) / h2).powi(2);
                rhs += r2.powf(gamma) * g;
            }
            (lhs, rhs)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    (lhs * h * h, rhs * h * h)
}

/// Weighted quotient `int |x|^(2g) |grad u|^2 / int |x|^(2g-2) |u|^2` for `u = curl psi`,
/// with derivatives of `u` taken by centered differences of the sampled velocity.
pub fn check_inequality_2d(f: &StreamField2D) -> Result<QuotientReport> {
    let (lhs, rhs) = vector_route_sums(&f.psi, f.size, f.spacing, f.gamma, &|_, _| true);
    if lhs == 0.0 {
        return Err(Error::ZeroField);
    }
    QuotientReport::new(rhs, lhs, f.target()?)
}

/// `int |x|^(2g) (psi_11^2 + 2 psi_12^2 + psi_22^2) / int |x|^(2g-2) |grad psi|^2`,
/// with second derivatives from direct stencils on `psi`.
pub fn check_corollary2(f: &StreamField2D) -> Result<QuotientReport> {
    let n = f.size;
    let h = f.spacing;
    let area = h * h;
    let p = |i: usize, j: usize| f.at(i, j);
    let (lhs, rhs) = (2..n - 2)
        .into_par_iter()
        .map(|i| {
            let mut lhs = 0.0;
            let mut rhs = 0.0;
            for j in 2..n - 2 {
                let (wl, wr) = f.weights(i, j);
                let d1 = (p(i + 1, j) - p(i - 1, j)) / (2.0 * h);
                let d2 = (p(i, j + 1) - p(i, j - 1)) / (2.0 * h);
                lhs += wl * (d1 * d1 + d2 * d2);
                let p11 = (p(i + 2, j) - 2.0 * p(i, j) + p(i - 2, j)) / (4.0 * h * h);
                let p22 = (p(i, j + 2) - 2.0 * p(i, j) + p(i, j - 2)) / (4.0 * h * h);
                let p12 = (p(i + 1, j + 1) - p(i + 1, j - 1) - p(i - 1, j + 1) + p(i - 1, j - 1)) / (4.0 * h * h);
                rhs += wr * (p11 * p11 + 2.0 * p12 * p12 + p22 * p22);
            }
            (lhs, rhs)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    if lhs == 0.0 {
        return Err(Error::ZeroField);
    }
    QuotientReport::new(rhs * area, lhs * area, f.target()?)
}

/// Same quotient as [`check_inequality_2d`] for a stream function given in closed form,
/// summed over nested Cartesian grids: level `k` covers `[-L_k, L_k]^2` with
/// `L_k = half_width / 2^k` and `size^2` cells, and contributes the cells outside
/// `[-L_k/2, L_k/2]^2` (all cells for the last level).
///
/// Each level keeps the cell size proportional to the distance from the origin, so
/// fields spread over several decades of radius stay resolved.
pub fn check_inequality_2d_nested(
    psi: impl Fn(f64, f64) -> f64 + Sync,
    gamma: f64,
    half_width: f64,
    size: usize,
    levels: usize,
) -> Result<QuotientReport> {
    if size < 8 || !size.is_multiple_of(2) || levels == 0 {
        return Err(Error::DegenerateGrid(format!("nested grid needs an even size >= 8 and at least one level, got {size} x {levels}")));
    }
    if !(half_width > 0.0) {
        return Err(Error::DegenerateGrid(format!("half width must be positive, got {half_width}")));
    }
    let target = sharp_constant(&Params::new(2, gamma)?).c_inverse;
    let padded = size + 4;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for k in 0..levels {
        let l = half_width / 2f64.powi(k as i32);
        let h = 2.0 * l / size as f64;
        let coord = |i: usize| (i as f64 + 0.5 - padded as f64 / 2.0) * h;
        let samples: Vec<f64> = (0..padded * padded).into_par_iter().map(|q| psi(coord(q / padded), coord(q % padded))).collect();
        let last = k + 1 == levels;
        let inner = l / 2.0;
        let (a, b) = vector_route_sums(&samples, padded, h, gamma, &|x, y| last || x.abs().max(y.abs()) > inner);
        lhs += a;
        rhs += b;
    }
    if lhs == 0.0 {
        return Err(Error::ZeroField);
    }
    QuotientReport::new(rhs, lhs, target)
}

/// Smooth step equal to 1 for `r <= r0` and 0 for `r >= r1`.
pub fn smooth_cutoff(r: f64, r0: f64, r1: f64) -> f64 {
    let s = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let tau = (r - r0) / (r1 - r0);
    let (a, b) = (s(1.0 - tau), s(tau));
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Grid side used by [`random_divfree_2d`].
pub const DEFAULT_RANDOM_SIZE: usize = 256;

/// Random compactly supported stream function on `[-1, 1]^2`: a sum of Gaussian bumps
/// centered in the disc of radius 0.7, times a cutoff supported in the disc of radius 0.92.
///
/// For `gamma < 0` the bumps are kept at least eight widths from the origin, so
/// `grad psi` vanishes there to rounding.
pub fn random_divfree_2d(seed: u64, num_bumps: usize, params: &Params) -> Result<StreamField2D> {
    random_divfree_2d_sized(seed, num_bumps, params, DEFAULT_RANDOM_SIZE)
}

/// [`random_divfree_2d`] on a `size x size` grid.
pub fn random_divfree_2d_sized(seed: u64, num_bumps: usize, params: &Params, size: usize) -> Result<StreamField2D> {
    if !params.is_planar() {
        return Err(Error::InvalidDimension(params.n()));
    }
    if num_bumps == 0 {
        return Err(Error::InvalidArgument("at least one bump is required".into()));
    }
    let gamma = params.gamma();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (s_lo, s_hi) = if gamma < 0.0 { (0.04, 0.07) } else { (0.05, 0.12) };
    let bumps: Vec<(f64, f64, f64, f64)> = (0..num_bumps)
        .map(|_| {
            let sigma = rng.random_range(s_lo..s_hi);
            let min_r = if gamma < 0.0 { 8.0 * sigma } else { 0.0 };
            let r = rng.random_range(min_r..0.7);
            let a = rng.random_range(0.0..2.0 * PI);
            let amp = rng.random_range(-1.0..1.0);
            (r * a.cos(), r * a.sin(), sigma, amp)
        })
        .collect();
    StreamField2D::from_fn(size, 1.0, gamma, |x, y| {
        let cut = smooth_cutoff((x * x + y * y).sqrt(), 0.75, 0.92);
        if cut == 0.0 {
            return 0.0;
        }
        cut * bumps
            .iter()
            .map(|&(cx, cy, s, amp)| amp * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp())
            .sum::<f64>()
    })
}

/// Radial stream function whose velocity is azimuthal with `u_phi(rho) = rho^(-gamma) g(log rho)`,
/// `g(t) = sin^2(pi (t - t0) / (t1 - t0))` on `[t0, t1]` and zero elsewhere.
///
/// In reduced variables this is the `m = 0` mode with profile `g`, whose quotient is
/// `gamma^2 + 1 + int g'^2 / int g^2 = gamma^2 + 1 + (4/3) (pi / (t1 - t0))^2`.
pub fn radial_stream_function(gamma: f64, t0: f64, t1: f64) -> impl Fn(f64, f64) -> f64 + Sync {
    let a = 1.0 - gamma;
    let b = 2.0 * PI / (t1 - t0);
    // antiderivative of e^(a s) sin^2(b (s - t0) / 2) = e^(a s) (1 - cos(b (s - t0))) / 2
    let prim = move |s: f64| {
        let e = (a * s).exp();
        let x = b * (s - t0);
        let first = if a == 0.0 { s } else { e / a };
        let second = e * (a * x.cos() + b * x.sin()) / (a * a + b * b);
        0.5 * (first - second)
    };
    let total = prim(t1);
    move |x: f64, y: f64| {
        let t = 0.5 * (x * x + y * y).ln();
        if t >= t1 {
            0.0
        } else {
            total - prim(t.max(t0))
        }
    }
}

/// Pointwise centered-difference divergence of `u = curl psi`, two cells in from the edge.
pub fn stream_divergence(f: &StreamField2D) -> Vec<f64> {
    let n = f.size;
    let (gx, gy) = f.gradient();
    let h2 = 2.0 * f.spacing;
    let mut out = Vec::with_capacity((n - 4) * (n - 4));
    for i in 2..n - 2 {
        for j in 2..n - 2 {
            let k = i * n + j;
            // d1 u1 + d2 u2 with u1 = gy, u2 = -gx
            out.push((gy[k + n] - gy[k - n]) / h2 - (gx[k + 1] - gx[k - 1]) / h2);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_field_examples() {
        let grid = PolarGrid::new(-20.0, 20.0, 512, 16).unwrap();
        let p = Params::new(2, -1.0).unwrap();
        let mut vp = vec![0.0; grid.len()];
        for i in 0..grid.nt() {
            for j in 0..grid.n_phi() {
                vp[i * grid.n_phi() + j] = (-grid.t(i).powi(2) / 8.0).exp() * (grid.phi(j) - 0.3).cos();
            }
        }
        let f = PolarField2D::from_azimuthal(grid, p, vp).unwrap();
        assert!(f.divergence_residual().iter().all(|r| r.abs() < 1e-10));
        let q = f.rayleigh_quotient().unwrap();
        assert!(q.value > q.target);
        assert!((q.target - 0.4).abs() < 1e-14);
    }

    #[test]
    fn cartesian_routes_agree_and_scale() {
        let f = StreamField2D::from_fn(128, 1.0, 1.0, |x, y| {
            let r2 = (x - 0.2).powi(2) + (y + 0.1).powi(2);
            smooth_cutoff((x * x + y * y).sqrt(), 0.75, 0.92) * (-r2 / (2.0 * 0.1f64.powi(2))).exp()
        })
        .unwrap();
        let a = check_inequality_2d(&f).unwrap();
        let b = check_corollary2(&f).unwrap();
        assert!((a.value - b.value).abs() < 1e-12 * a.value);
        assert!(a.value >= 2.0);
        let c = check_inequality_2d(&f.scaled(-3.5)).unwrap();
        assert!((a.value - c.value).abs() < 1e-12 * a.value);
        assert!(stream_divergence(&f).iter().all(|d| d.abs() < 1e-9));
    }

    #[test]
    fn rejects_uncompact_and_zero() {
        assert!(StreamField2D::from_fn(64, 1.0, 1.0, |_, _| 1.0).is_err());
        let z = StreamField2D::from_fn(64, 1.0, 1.0, |_, _| 0.0).unwrap();
        assert!(matches!(check_inequality_2d(&z), Err(Error::ZeroField)));
        assert!(matches!(check_corollary2(&z), Err(Error::ZeroField)));
    }

    #[test]
    fn random_fields_respect_inequality() {
        for gamma in [-1.0, 0.5, 2.0] {
            let p = Params::new(2, gamma).unwrap();
            for seed in 0..3 {
                let f = random_divfree_2d_sized(seed, 4, &p, 128).unwrap();
                assert!(check_inequality_2d(&f).unwrap().respects(1e-3));
                if gamma < 0.0 {
                    assert!(f.origin_gradient() < 1e-10);
                }
            }
        }
        let p = Params::new(2, 1.0).unwrap();
        let a = random_divfree_2d_sized(7, 3, &p, 64).unwrap();
        let b = random_divfree_2d_sized(7, 3, &p, 64).unwrap();
        assert_eq!(a.psi(), b.psi());
    }

    #[test]
    fn nested_radial_field_matches_closed_form() {
        let (t1, width) = (0.8f64.ln(), 9.0);
        for gamma in [2.0, 0.5] {
            let psi = radial_stream_function(gamma, t1 - width, t1);
            let q = check_inequality_2d_nested(&psi, gamma, 1.0, 128, 16).unwrap();
            let exact = gamma * gamma + 1.0 + 4.0 / 3.0 * (PI / width).powi(2);
            assert!((q.value - exact).abs() < 2e-3 * exact, "{} vs {}", q.value, exact);
        }
    }
}
