//! The polar-angle operators `Dcal = d/dtheta + (n-2) cot theta` and `T = -d/dtheta Dcal`.
//!
//! Profiles that vanish at the poles are handled in factored form `f = sin(theta) g`:
//! with `g` differentiated spectrally, `f' = cos g + sin g'` and
//! `Dcal f = (n-1) cos g + sin g'` contain no `cot theta` factor.
//!
//! Every function accepts either one profile (`n_theta` values) or a row-major batch of
//! profiles (`rows x n_theta`); rows are processed together as one matrix product.

use nalgebra::{DMatrix, DMatrixView};

use crate::error::{Error, Result};
use crate::grid::ThetaGrid;

/// Default ratio allowed between `max |f / sin theta|` and `max(|f|, |f'|)`.
///
/// For `f(0) = f(pi) = 0` the mean value theorem bounds the ratio by `pi / 2`.
pub const DEFAULT_POLE_BOUND: f64 = 2.0;

fn rows_of(f: &[f64], m: usize) -> Result<usize> {
    if m == 0 || !f.len().is_multiple_of(m) {
        return Err(Error::InvalidArgument(format!(
            "profile length {} is not a multiple of n_theta = {m}",
            f.len()
        )));
    }
    Ok(f.len() / m)
}

/// `op * F` where the columns of `F` are the rows of the batch.
fn apply(op: &DMatrix<f64>, f: &[f64], m: usize) -> Vec<f64> {
    let rows = f.len() / m;
    let x = DMatrixView::from_slice(f, m, rows);
    (op * x).as_slice().to_vec()
}

/// `f / sin theta` at every node.
pub fn pole_quotient(f: &[f64], grid: &ThetaGrid) -> Result<Vec<f64>> {
    let m = grid.len();
    rows_of(f, m)?;
    let s = grid.sin();
    Ok(f.iter().enumerate().map(|(k, v)| v / s[k % m]).collect())
}

/// `d f / d theta` for profiles that need not vanish at the poles.
pub fn smooth_derivative(f: &[f64], grid: &ThetaGrid) -> Result<Vec<f64>> {
    rows_of(f, grid.len())?;
    Ok(apply(grid.diff(), f, grid.len()))
}

fn check_poles(f: &[f64], g: &[f64], grid: &ThetaGrid, bound: f64) -> Result<()> {
    let m = grid.len();
    let df = apply(grid.diff(), f, m);
    for ((fr, gr), dr) in f.chunks_exact(m).zip(g.chunks_exact(m)).zip(df.chunks_exact(m)) {
        let scale = fr.iter().chain(dr).fold(0.0f64, |a, v| a.max(v.abs()));
        let gmax = gr.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if gmax > bound * scale {
            return Err(Error::PoleSingularity(format!(
                "|f / sin theta| reaches {gmax:.3e} against a profile scale of {scale:.3e}; \
                 the profile does not vanish at the poles"
            )));
        }
    }
    Ok(())
}

/// `g = f / sin theta` and `g'`, after checking that `f` vanishes at the poles.
fn factored(f: &[f64], grid: &ThetaGrid, bound: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = pole_quotient(f, grid)?;
    check_poles(f, &g, grid, bound)?;
    let dg = apply(grid.diff(), &g, grid.len());
    Ok((g, dg))
}

/// `d f / d theta` for a profile vanishing at the poles.
pub fn pole_derivative(f: &[f64], grid: &ThetaGrid) -> Result<Vec<f64>> {
    let m = grid.len();
    let (g, dg) = factored(f, grid, DEFAULT_POLE_BOUND)?;
    let (s, c) = (grid.sin(), grid.cos());
    Ok((0..f.len()).map(|k| c[k % m] * g[k] + s[k % m] * dg[k]).collect())
}

/// `Dcal f = f' + (n-2) cot(theta) f`.
pub fn theta_divergence(f: &[f64], grid: &ThetaGrid) -> Result<Vec<f64>> {
    theta_divergence_with_bound(f, grid, DEFAULT_POLE_BOUND)
}

/// [`theta_divergence`] with a custom pole bound.
pub fn theta_divergence_with_bound(f: &[f64], grid: &ThetaGrid, bound: f64) -> Result<Vec<f64>> {
    let m = grid.len();
    let (g, dg) = factored(f, grid, bound)?;
    let (s, c) = (grid.sin(), grid.cos());
    let a = grid.n() as f64 - 1.0;
    Ok((0..f.len()).map(|k| a * c[k % m] * g[k] + s[k % m] * dg[k]).collect())
}

/// `T f = -d/dtheta (Dcal f)`, evaluated as the composition of the two derivatives.
pub fn angular_operator(f: &[f64], grid: &ThetaGrid) -> Result<Vec<f64>> {
    let h = theta_divergence(f, grid)?;
    Ok(apply(grid.diff(), &h, grid.len()).into_iter().map(|v| -v).collect())
}

/// `T f = -f'' - (n-2) cot f' + (n-2) f / sin^2`, with the direct second-derivative matrix.
///
/// In factored form this is `sin ((n-1) g - g'') - n cos g'`.
pub fn angular_operator_laplace(f: &[f64], grid: &ThetaGrid) -> Result<Vec<f64>> {
    let m = grid.len();
    let (g, dg) = factored(f, grid, DEFAULT_POLE_BOUND)?;
    let d2g = apply(grid.diff2(), &g, m);
    let (s, c) = (grid.sin(), grid.cos());
    let n = grid.n() as f64;
    Ok((0..f.len())
        .map(|k| s[k % m] * ((n - 1.0) * g[k] - d2g[k]) - n * c[k % m] * dg[k])
        .collect())
}

/// Matrix of `T` acting on `g = f / sin theta`: `T(sin g) = sin (M g)` with
/// `M = (n-1) I - D^2 - n diag(cot) D`.
pub fn angular_matrix(grid: &ThetaGrid) -> DMatrix<f64> {
    let m = grid.len();
    let n = grid.n() as f64;
    let d = grid.diff();
    let mut out = -(d * d);
    for i in 0..m {
        let cot = grid.cos()[i] / grid.sin()[i];
        for j in 0..m {
            out[(i, j)] -= n * cot * d[(i, j)];
        }
        out[(i, i)] += n - 1.0;
    }
    out
}

/// The `count` smallest eigenvalues of the discretized `T`, ascending.
///
/// Fails if any of them has a non-negligible imaginary part.
pub fn angular_spectrum(grid: &ThetaGrid, count: usize) -> Result<Vec<f64>> {
    let eig = angular_matrix(grid).complex_eigenvalues();
    let mut vals = Vec::with_capacity(eig.len());
    for z in eig.iter() {
        if z.im.abs() > 1e-8 * z.re.abs().max(1.0) {
            return Err(Error::Domain(format!("discretized T has a complex eigenvalue {z}")));
        }
        vals.push(z.re);
    }
    vals.sort_by(|a, b| a.total_cmp(b));
    vals.truncate(count);
    Ok(vals)
}

/// Weighted inner product `int_0^pi f g sin^(n-2) d theta` of two single profiles.
pub fn theta_inner(f: &[f64], g: &[f64], grid: &ThetaGrid) -> f64 {
    f.iter().zip(g).zip(grid.weights()).map(|((a, b), w)| a * b * w).sum()
}
