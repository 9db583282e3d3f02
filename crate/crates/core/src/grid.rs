//! Discretization of the reduced domain: a uniform grid in `t = log rho` and
//! Gauss–Legendre nodes in the polar angle `theta`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::TAxis;

/// Default number of `t` samples.
pub const DEFAULT_NT: usize = 1024;
/// Default number of `theta` nodes.
pub const DEFAULT_N_THETA: usize = 256;
/// Default `t` window.
pub const DEFAULT_T_RANGE: (f64, f64) = (-12.0, 12.0);

/// `int_0^pi sin^m(theta) d theta`, by the Wallis recursion.
pub fn wallis_integral(m: usize) -> f64 {
    let mut even = PI;
    let mut odd = 2.0;
    for k in 2..=m {
        let next = (k as f64 - 1.0) / k as f64 * if k % 2 == 0 { even } else { odd };
        if k % 2 == 0 {
            even = next;
        } else {
            odd = next;
        }
    }
    if m.is_multiple_of(2) {
        even
    } else {
        odd
    }
}

/// Surface area of the unit sphere `S^m` in `R^(m+1)`.
pub fn sphere_area(m: usize) -> f64 {
    // |S^m| = 2 pi / (m - 1) |S^(m-2)|
    let mut even = 2.0;
    let mut odd = 2.0 * PI;
    for k in 2..=m {
        let next = 2.0 * PI / (k as f64 - 1.0) * if k % 2 == 0 { even } else { odd };
        if k % 2 == 0 {
            even = next;
        } else {
            odd = next;
        }
    }
    if m.is_multiple_of(2) {
        even
    } else {
        odd
    }
}

/// Gauss–Legendre nodes on `(0, pi)` with the spectral differentiation matrices built on them.
#[derive(Debug, Clone)]
pub struct ThetaGrid {
    n: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    sin: Vec<f64>,
    cos: Vec<f64>,
    diff: DMatrix<f64>,
    diff2: DMatrix<f64>,
}

impl ThetaGrid {
    /// `count` nodes for dimension `n`; weights carry the factor `sin^(n-2)`.
    pub fn new(count: usize, n: usize) -> Result<Self> {
        if count < 4 {
            return Err(Error::DegenerateGrid(format!("need at least 4 theta nodes, got {count}")));
        }
        if n < 3 {
            return Err(Error::InvalidDimension(n));
        }
        let rule = GaussLegendre::new(NonZeroUsize::new(count).expect("count >= 4"));
        let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let nodes: Vec<f64> = pairs.iter().map(|&(x, _)| 0.5 * PI * (x + 1.0)).collect();
        let sin: Vec<f64> = nodes.iter().map(|t| t.sin()).collect();
        let cos: Vec<f64> = nodes.iter().map(|t| t.cos()).collect();
        let weights: Vec<f64> = pairs
            .iter()
            .zip(&sin)
            .map(|(&(_, w), s)| 0.5 * PI * w * s.powi(n as i32 - 2))
            .collect();

        let expected = wallis_integral(n - 2);
        let total: f64 = weights.iter().sum();
        if ((total - expected) / expected).abs() > 1e-10 {
            return Err(Error::DegenerateGrid(format!(
                "theta weights sum to {total}, Wallis value is {expected}"
            )));
        }

        let bary: Vec<f64> = pairs
            .iter()
            .enumerate()
            .map(|(j, &(x, w))| {
                let s = ((1.0 - x * x) * w).sqrt();
                if j % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();
        let (diff, diff2) = differentiation_matrices(&nodes, &bary);
        Ok(Self { n, nodes, weights, sin, cos, diff, diff2 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weights for `int_0^pi f sin^(n-2) d theta`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sin(&self) -> &[f64] {
        &self.sin
    }

    pub fn cos(&self) -> &[f64] {
        &self.cos
    }

    /// First-derivative matrix of the polynomial interpolant.
    pub fn diff(&self) -> &DMatrix<f64> {
        &self.diff
    }

    /// Second-derivative matrix of the polynomial interpolant.
    pub fn diff2(&self) -> &DMatrix<f64> {
        &self.diff2
    }

    /// `int_0^pi f sin^(n-2) d theta`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }
}

fn differentiation_matrices(nodes: &[f64], bary: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = nodes.len();
    let mut d = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        let mut row = 0.0;
        for j in 0..m {
            if i != j {
                let v = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
                d[(i, j)] = v;
                row += v;
            }
        }
        d[(i, i)] = -row;
    }
    let mut d2 = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        let mut row = 0.0;
        for j in 0..m {
            if i != j {
                let v = 2.0 * d[(i, j)] * (d[(i, i)] - 1.0 / (nodes[i] - nodes[j]));
                d2[(i, j)] = v;
                row += v;
            }
        }
        d2[(i, i)] = -row;
    }
    (d, d2)
}

/// Uniform periodic grid in `t` on `[t_min, t_max)` times a [`ThetaGrid`].
#[derive(Debug, Clone)]
pub struct LogRadialGrid {
    t_min: f64,
    t_max: f64,
    nt: usize,
    theta: Arc<ThetaGrid>,
    axis: TAxis,
}

/// Serializable description of a [`LogRadialGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nt: usize,
    pub n_theta: usize,
    pub t_min: f64,
    pub t_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { nt: DEFAULT_NT, n_theta: DEFAULT_N_THETA, t_min: DEFAULT_T_RANGE.0, t_max: DEFAULT_T_RANGE.1 }
    }
}

impl std::fmt::Display for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{} t[{}, {}]", self.nt, self.n_theta, self.t_min, self.t_max)
    }
}

impl LogRadialGrid {
    pub fn new(t_min: f64, t_max: f64, nt: usize, n_theta: usize, n: usize) -> Result<Self> {
        let theta = Arc::new(ThetaGrid::new(n_theta, n)?);
        Self::with_theta(t_min, t_max, nt, theta)
    }

    pub fn from_spec(spec: &GridSpec, n: usize) -> Result<Self> {
        Self::new(spec.t_min, spec.t_max, spec.nt, spec.n_theta, n)
    }

    /// Shares an existing angular discretization.
    pub fn with_theta(t_min: f64, t_max: f64, nt: usize, theta: Arc<ThetaGrid>) -> Result<Self> {
        if !nt.is_power_of_two() || nt < 8 {
            return Err(Error::DegenerateGrid(format!("nt must be a power of two >= 8, got {nt}")));
        }
        if !(t_max > t_min) || !t_min.is_finite() || !t_max.is_finite() {
            return Err(Error::DegenerateGrid(format!("empty t range [{t_min}, {t_max}]")));
        }
        let axis = TAxis::new(nt, (t_max - t_min) / nt as f64, t_min);
        Ok(Self { t_min, t_max, nt, theta, axis })
    }

    /// Samples `f(t, theta)` row-major.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.nt {
            let t = self.t(i);
            out.extend(self.theta.nodes().iter().map(|&th| f(t, th)));
        }
        out
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec { nt: self.nt, n_theta: self.theta.len(), t_min: self.t_min, t_max: self.t_max }
    }

    pub fn n(&self) -> usize {
        self.theta.n()
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / self.nt as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t_min + i as f64 * self.dt()
    }

    pub fn ts(&self) -> Vec<f64> {
        (0..self.nt).map(|i| self.t(i)).collect()
    }

    /// Fourier transform along `t`.
    pub fn t_axis(&self) -> &TAxis {
        &self.axis
    }

    pub fn theta(&self) -> &ThetaGrid {
        &self.theta
    }

    pub fn theta_shared(&self) -> Arc<ThetaGrid> {
        Arc::clone(&self.theta)
    }

    pub fn theta_nodes(&self) -> &[f64] {
        self.theta.nodes()
    }

    pub fn theta_weights(&self) -> &[f64] {
        self.theta.weights()
    }

    /// `|S^(n-2)|`, the measure of the azimuthal sphere each `(t, theta)` point stands for.
    pub fn solid_angle(&self) -> f64 {
        sphere_area(self.n() - 2)
    }

    /// Number of samples in a `nt x n_theta` array.
    pub fn len(&self) -> usize {
        self.nt * self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `|S^(n-2)| sum_t sum_theta a w_theta dt` for a row-major `nt x n_theta` array.
    pub fn integrate(&self, a: &[f64]) -> f64 {
        let m = self.n_theta();
        let w = self.theta_weights();
        let s: f64 = a.chunks_exact(m).map(|row| row.iter().zip(w).map(|(x, y)| x * y).sum::<f64>()).sum();
        s * self.dt() * self.solid_angle()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wallis_values() {
        assert!((wallis_integral(0) - PI).abs() < 1e-15);
        assert!((wallis_integral(1) - 2.0).abs() < 1e-15);
        assert!((wallis_integral(2) - PI / 2.0).abs() < 1e-15);
        assert!((wallis_integral(3) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_areas() {
        assert_eq!(sphere_area(0), 2.0);
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
        // |S^m| = |S^(m-1)| * wallis(m-1)
        for m in 1..12 {
            assert!((sphere_area(m) - sphere_area(m - 1) * wallis_integral(m - 1)).abs() < 1e-12 * sphere_area(m));
        }
    }

    #[test]
    fn nodes_are_symmetric_and_sorted() {
        let g = ThetaGrid::new(64, 3).unwrap();
        let x = g.nodes();
        for i in 0..x.len() {
            assert!(x[i] > 0.0 && x[i] < PI);
            assert!((x[i] + x[x.len() - 1 - i] - PI).abs() < 1e-13);
            if i > 0 {
                assert!(x[i] > x[i - 1]);
            }
        }
    }

    #[test]
    fn weighted_moments() {
        for n in 3..=8 {
            let g = ThetaGrid::new(48, n).unwrap();
            let ones = vec![1.0; g.len()];
            assert!((g.integrate(&ones) - wallis_integral(n - 2)).abs() < 1e-12);
            let c2: Vec<f64> = g.cos().iter().map(|c| c * c).collect();
            let expected = wallis_integral(n - 2) - wallis_integral(n);
            assert!((g.integrate(&c2) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn differentiates_trig_polynomials() {
        let g = ThetaGrid::new(40, 3).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|t| (3.0 * t).sin() + t.cos().powi(2)).collect();
        let df = g.diff() * nalgebra::DVector::from_column_slice(&f);
        let d2f = g.diff2() * nalgebra::DVector::from_column_slice(&f);
        for (i, t) in g.nodes().iter().enumerate() {
            let exact = 3.0 * (3.0 * t).cos() - (2.0 * t).sin();
            let exact2 = -9.0 * (3.0 * t).sin() - 2.0 * (2.0 * t).cos();
            assert!((df[i] - exact).abs() < 1e-10, "{i}");
            assert!((d2f[i] - exact2).abs() < 1e-8, "{i}");
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(LogRadialGrid::new(-1.0, 1.0, 1000, 16, 3).is_err());
        assert!(LogRadialGrid::new(1.0, 1.0, 1024, 16, 3).is_err());
        assert!(LogRadialGrid::new(-1.0, 1.0, 1024, 2, 3).is_err());
        assert!(LogRadialGrid::new(-1.0, 1.0, 1024, 16, 2).is_err());
        assert!(LogRadialGrid::new(-1.0, 1.0, 1024, 16, 3).is_ok());
    }

    #[test]
    fn gaussian_integral() {
        let grid = LogRadialGrid::new(-12.0, 12.0, 512, 32, 3).unwrap();
        let mut a = vec![0.0; grid.len()];
        for i in 0..grid.nt() {
            let t = grid.t(i);
            for (j, s) in grid.theta().sin().iter().enumerate() {
                a[i * grid.n_theta() + j] = (-2.0 * t * t).exp() * s * s;
            }
        }
        let expected = 2.0 * PI * (PI / 2.0).sqrt() * 4.0 / 3.0;
        assert!((grid.integrate(&a) - expected).abs() < 1e-12 * expected);
    }
}
