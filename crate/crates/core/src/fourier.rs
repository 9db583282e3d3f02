//! Unitary Fourier transform along the `t` axis of row-major `nt x m` arrays.
//!
//! `w(lambda_k) = dt / sqrt(2 pi) sum_j v(t_j) exp(-i lambda_k t_j)`, so that
//! `sum_j |v_j|^2 dt = sum_k |w_k|^2 d_lambda` holds exactly.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Transform plans for one `t` discretization.
#[derive(Clone)]
pub struct TAxis {
    nt: usize,
    dt: f64,
    t_min: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for TAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TAxis").field("nt", &self.nt).field("dt", &self.dt).field("t_min", &self.t_min).finish()
    }
}

impl TAxis {
    pub fn new(nt: usize, dt: f64, t_min: f64) -> Self {
        let mut planner = FftPlanner::new();
        Self { nt, dt, t_min, forward: planner.plan_fft_forward(nt), inverse: planner.plan_fft_inverse(nt) }
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    /// Frequency spacing `2 pi / (nt dt)`.
    pub fn d_lambda(&self) -> f64 {
        2.0 * PI / (self.nt as f64 * self.dt)
    }

    /// Discrete frequencies in FFT order; the Nyquist entry is negative.
    pub fn lambdas(&self) -> Vec<f64> {
        let n = self.nt as i64;
        (0..n).map(|k| if k < n / 2 { k } else { k - n } as f64 * self.d_lambda()).collect()
    }

    /// Symbol of `d/dt`: `i lambda`, zero at the Nyquist frequency.
    pub fn derivative_symbol(&self) -> Vec<f64> {
        let mut s = self.lambdas();
        s[self.nt / 2] = 0.0;
        s
    }

    /// Forward transform of every column.
    pub fn forward(&self, v: &[f64], m: usize) -> Vec<Complex64> {
        assert!(m > 0, "empty column count");
        assert_eq!(v.len(), self.nt * m, "array is not nt x m");
        let scale = self.dt / (2.0 * PI).sqrt();
        let phase: Vec<Complex64> =
            self.lambdas().iter().map(|l| Complex64::from_polar(scale, -l * self.t_min)).collect();
        let cols: Vec<Vec<Complex64>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let mut buf: Vec<Complex64> = (0..self.nt).map(|i| Complex64::new(v[i * m + j], 0.0)).collect();
                self.forward.process(&mut buf);
                buf.iter_mut().zip(&phase).for_each(|(z, p)| *z *= p);
                buf
            })
            .collect();
        interleave(&cols, self.nt, m)
    }

    /// Inverse of [`TAxis::forward`], keeping the real part.
    pub fn inverse(&self, w: &[Complex64], m: usize) -> Vec<f64> {
        assert!(m > 0, "empty column count");
        assert_eq!(w.len(), self.nt * m, "array is not nt x m");
        let scale = (2.0 * PI).sqrt() / self.dt / self.nt as f64;
        let phase: Vec<Complex64> =
            self.lambdas().iter().map(|l| Complex64::from_polar(scale, l * self.t_min)).collect();
        let cols: Vec<Vec<Complex64>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let mut buf: Vec<Complex64> = (0..self.nt).map(|k| w[k * m + j] * phase[k]).collect();
                self.inverse.process(&mut buf);
                buf
            })
            .collect();
        interleave(&cols, self.nt, m).into_iter().map(|z| z.re).collect()
    }

    /// Applies a per-frequency multiplier in frequency space.
    pub fn filter(&self, v: &[f64], m: usize, symbol: impl Fn(usize, f64) -> Complex64) -> Vec<f64> {
        let mut w = self.forward(v, m);
        let lambdas = self.lambdas();
        for (k, row) in w.chunks_exact_mut(m).enumerate() {
            let s = symbol(k, lambdas[k]);
            row.iter_mut().for_each(|z| *z *= s);
        }
        self.inverse(&w, m)
    }

    /// Spectral `d/dt` of every column.
    pub fn derivative(&self, v: &[f64], m: usize) -> Vec<f64> {
        let sym = self.derivative_symbol();
        self.filter(v, m, |k, _| Complex64::new(0.0, sym[k]))
    }
}

fn interleave(cols: &[Vec<Complex64>], nt: usize, m: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); nt * m];
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            out[i * m + j] = *z;
        }
    }
    out
}
