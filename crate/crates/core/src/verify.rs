//! End-to-end checks: minimizing sequences, random admissible fields and constant sweeps.

use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{rel_diff, sharp_constant};
use crate::energy::{rayleigh_quotient, QuotientReport};
use crate::error::{Error, Result};
use crate::field::{solve_radial_component, AxisymFieldV};
use crate::grid::{GridSpec, LogRadialGrid};
use crate::operators::theta_divergence;
use crate::params::Params;
use crate::planar::{check_inequality_2d, PolarField2D, PolarGrid, StreamField2D};
use crate::spectral::{
    brute_force_infimum, f_2d, total_infimum, DEFAULT_LAMBDA_MAX, DEFAULT_LAMBDA_POINTS, DEFAULT_NU_MAX,
};

/// Number of `phi` samples for planar sequence fields; the modes used are `e^(i m phi)`, `|m| <= 1`.
pub const DEFAULT_N_PHI: usize = 16;

/// Distance from the window edge to the profile center, in profile widths, plus a fixed pad.
const SEQUENCE_WIDTHS: f64 = 6.5;
const SEQUENCE_PAD: f64 = 4.0;

/// Lowest-mode family a sequence concentrates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SequenceKind {
    /// `v_theta = g_k(t) sin(theta)`, `v_rho` from the divergence constraint.
    PoloidalN3plus,
    /// `v_phi = g_k(t) sin(theta)`.
    AzimuthalN3plus,
    /// `n = 2`, `v_phi = g_k(t)`, `v_rho = 0`.
    #[serde(rename = "TwoD_NuZero")]
    TwoDNuZero,
    /// `n = 2`, `v_phi = g_k(t) cos(phi - phi0)`, `v_rho` from the divergence constraint.
    #[serde(rename = "TwoD_NuOne")]
    TwoDNuOne,
}

impl SequenceKind {
    pub fn label(&self) -> &'static str {
        match self {
            SequenceKind::PoloidalN3plus => "PoloidalN3plus",
            SequenceKind::AzimuthalN3plus => "AzimuthalN3plus",
            SequenceKind::TwoDNuZero => "TwoD_NuZero",
            SequenceKind::TwoDNuOne => "TwoD_NuOne",
        }
    }

    /// Kinds available in dimension `n`.
    pub fn candidates(n: usize) -> [SequenceKind; 2] {
        if n == 2 {
            [SequenceKind::TwoDNuZero, SequenceKind::TwoDNuOne]
        } else {
            [SequenceKind::PoloidalN3plus, SequenceKind::AzimuthalN3plus]
        }
    }

    /// The kind whose limit is the sharp value for `p`.
    pub fn optimal(p: &Params) -> SequenceKind {
        let target = total_infimum(p);
        if p.is_planar() {
            if target == 1.0 {
                SequenceKind::TwoDNuZero
            } else {
                SequenceKind::TwoDNuOne
            }
        } else if target == (p.dim() - 1.0) {
            SequenceKind::AzimuthalN3plus
        } else {
            SequenceKind::PoloidalN3plus
        }
    }

    /// Reduced quotient approached as `k` grows.
    pub fn limit(&self, p: &Params) -> Result<f64> {
        match self {
            SequenceKind::PoloidalN3plus if !p.is_planar() => crate::spectral::poloidal_infimum(p),
            SequenceKind::AzimuthalN3plus if !p.is_planar() => Ok(p.dim() - 1.0),
            SequenceKind::TwoDNuZero if p.is_planar() => f_2d(0.0, 0, p.gamma()),
            SequenceKind::TwoDNuOne if p.is_planar() => f_2d(0.0, 1, p.gamma()),
            _ => Err(Error::InvalidDimension(p.n())),
        }
    }
}

impl std::fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One member of a minimizing sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizingSequenceSpec {
    pub kind: SequenceKind,
    /// Width of the Gaussian `t`-profile `g_k(t) = exp(-(t - t_c)^2 / (2 k^2))`; its
    /// transform is concentrated in `|lambda| <~ 1/k`.
    pub k: f64,
    /// Phase offset of the planar wavenumber-one field.
    pub phi0: f64,
    pub params: Params,
}

impl MinimizingSequenceSpec {
    pub fn new(kind: SequenceKind, k: f64, params: Params) -> Result<Self> {
        if !(k >= 1.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(format!("k must be >= 1, got {k}")));
        }
        if params.is_planar() != matches!(kind, SequenceKind::TwoDNuZero | SequenceKind::TwoDNuOne) {
            return Err(Error::InvalidArgument(format!("{kind} is not available for n = {}", params.n())));
        }
        Ok(Self { kind, k, phi0: 0.0, params })
    }

    pub fn with_phase(mut self, phi0: f64) -> Self {
        self.phi0 = phi0;
        self
    }

    /// Same spec with `k` replaced.
    pub fn at(&self, k: f64) -> Result<Self> {
        Ok(Self::new(self.kind, k, self.params)?.with_phase(self.phi0))
    }
}

/// Symmetric `t` window wide enough for the width-`k` profile to decay below the admissibility threshold.
pub fn sequence_grid(k: f64, nt: usize, n_theta: usize) -> GridSpec {
    let half = SEQUENCE_WIDTHS * k + SEQUENCE_PAD;
    GridSpec { nt, n_theta, t_min: -half, t_max: half }
}

/// Planar field in either representation.
#[derive(Debug, Clone)]
pub enum Field2D {
    /// Reduced field in `(t, phi)`; its quotient is measured against the angular infimum.
    Polar(PolarField2D),
    /// Cartesian stream function; its quotient is measured against `1/C`.
    Stream(StreamField2D),
}

impl Field2D {
    pub fn rayleigh_quotient(&self) -> Result<QuotientReport> {
        match self {
            Field2D::Polar(f) => f.rayleigh_quotient(),
            Field2D::Stream(f) => check_inequality_2d(f),
        }
    }
}

/// Output of [`build_minimizing_field`].
#[derive(Debug, Clone)]
pub enum MinimizingField {
    Axisym(AxisymFieldV),
    Planar(Field2D),
}

impl MinimizingField {
    pub fn rayleigh_quotient(&self) -> Result<QuotientReport> {
        match self {
            MinimizingField::Axisym(v) => rayleigh_quotient(v),
            MinimizingField::Planar(f) => f.rayleigh_quotient(),
        }
    }

    /// Largest pointwise residual of the divergence constraint.
    pub fn divergence_residual(&self) -> Result<f64> {
        let r = match self {
            MinimizingField::Axisym(v) => crate::field::divergence_residual(v)?,
            MinimizingField::Planar(Field2D::Polar(f)) => f.divergence_residual(),
            MinimizingField::Planar(Field2D::Stream(f)) => crate::planar::stream_divergence(f),
        };
        Ok(r.iter().fold(0.0, |a, x| a.max(x.abs())))
    }
}

/// Realizes one member of a minimizing sequence on `grid` (`n_theta` is ignored for `n = 2`).
/// The profile is centered in the `t` window.
pub fn build_minimizing_field(spec: &MinimizingSequenceSpec, grid: &GridSpec) -> Result<MinimizingField> {
    let p = spec.params;
    let center = 0.5 * (grid.t_min + grid.t_max);
    let k2 = 2.0 * spec.k * spec.k;
    let g = move |t: f64| (-(t - center).powi(2) / k2).exp();
    match spec.kind {
        SequenceKind::PoloidalN3plus | SequenceKind::AzimuthalN3plus => {
            let lg = LogRadialGrid::from_spec(grid, p.n())?;
            let profile = lg.sample(|t, th| g(t) * th.sin());
            let zero = vec![0.0; lg.len()];
            let field = if spec.kind == SequenceKind::PoloidalN3plus {
                let vr = solve_radial_component(&profile, &lg, &p)?;
                AxisymFieldV::new(lg, p, vr, profile, zero)?
            } else {
                AxisymFieldV::new(lg, p, zero.clone(), zero, profile)?
            };
            Ok(MinimizingField::Axisym(field))
        }
        SequenceKind::TwoDNuZero | SequenceKind::TwoDNuOne => {
            let pg = PolarGrid::new(grid.t_min, grid.t_max, grid.nt, DEFAULT_N_PHI)?;
            let np = pg.n_phi();
            let mut vp = vec![0.0; pg.len()];
            for i in 0..pg.nt() {
                let gt = g(pg.t(i));
                for j in 0..np {
                    vp[i * np + j] = match spec.kind {
                        SequenceKind::TwoDNuZero => gt,
                        _ => gt * (pg.phi(j) - spec.phi0).cos(),
                    };
                }
            }
            let field = if spec.kind == SequenceKind::TwoDNuZero {
                PolarField2D::new(pg, p, vec![0.0; vp.len()], vp)?
            } else {
                PolarField2D::from_azimuthal(pg, p, vp)?
            };
            Ok(MinimizingField::Planar(Field2D::Polar(field)))
        }
    }
}

/// One rung of a `k`-ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub k: f64,
    pub value: f64,
    pub target: f64,
    /// `value - limit`, with `limit` the quotient the sequence kind converges to.
    pub gap: f64,
    /// Previous gap over this gap.
    pub ratio: Option<f64>,
}

/// Quotients of `spec` at every `k` in `ks`, all on the same grid.
pub fn convergence_ladder(spec: &MinimizingSequenceSpec, ks: &[f64], grid: &GridSpec) -> Result<Vec<LadderRow>> {
    let limit = spec.kind.limit(&spec.params)?;
    let mut rows: Vec<LadderRow> = Vec::with_capacity(ks.len());
    for &k in ks {
        let report = build_minimizing_field(&spec.at(k)?, grid)?.rayleigh_quotient()?;
        let gap = report.value - limit;
        let ratio = rows.last().map(|r| r.gap / gap);
        rows.push(LadderRow { k, value: report.value, target: report.target, gap, ratio });
    }
    Ok(rows)
}

/// Random admissible axisymmetric field on `grid`.
///
/// A random potential `chi(t, theta) = sum_j a_j exp(-(t - t_j)^2 / (2 s_j^2)) sin(theta) P_j(cos theta)`
/// with cubic `P_j` gives `v_theta = (d_t + n/2 - gamma) chi` and `v_rho = -Dcal chi`, which is
/// divergence free and compactly supported for every `gamma`. `v_phi` is an independent sum of
/// the same form.
pub fn random_axisym_field(seed: u64, num_bumps: usize, params: &Params, grid: &LogRadialGrid) -> Result<AxisymFieldV> {
    if params.is_planar() {
        return Err(Error::InvalidDimension(params.n()));
    }
    if num_bumps == 0 {
        return Err(Error::InvalidArgument("at least one bump is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = 0.5 * (grid.t_min() + grid.t_max());
    let scale = (grid.t_max() - grid.t_min()) / 24.0;
    let draw = |rng: &mut ChaCha8Rng| -> Vec<(f64, f64, f64, [f64; 4])> {
        (0..num_bumps)
            .map(|_| {
                let tc = center + scale * rng.random_range(-3.0..3.0);
                let s = scale * rng.random_range(0.4..1.0);
                let amp = rng.random_range(-1.0..1.0);
                let poly = [0; 4].map(|_| rng.random_range(-1.0..1.0));
                (tc, s, amp, poly)
            })
            .collect()
    };
    let chi_bumps = draw(&mut rng);
    let phi_bumps = draw(&mut rng);
    let angular = |poly: &[f64; 4], th: f64| {
        let c = th.cos();
        th.sin() * (poly[0] + c * (poly[1] + c * (poly[2] + c * poly[3])))
    };
    let shift = params.shift();
    let chi = grid.sample(|t, th| {
        chi_bumps.iter().map(|(tc, s, a, poly)| a * (-(t - tc).powi(2) / (2.0 * s * s)).exp() * angular(poly, th)).sum()
    });
    let v_theta = grid.sample(|t, th| {
        chi_bumps
            .iter()
            .map(|(tc, s, a, poly)| {
                let bump = (-(t - tc).powi(2) / (2.0 * s * s)).exp();
                a * bump * (shift - (t - tc) / (s * s)) * angular(poly, th)
            })
            .sum()
    });
    let v_phi = grid.sample(|t, th| {
        phi_bumps.iter().map(|(tc, s, a, poly)| a * (-(t - tc).powi(2) / (2.0 * s * s)).exp() * angular(poly, th)).sum()
    });
    let v_rho: Vec<f64> = theta_divergence(&chi, grid.theta())?.iter().map(|x| -x).collect();
    AxisymFieldV::new(grid.clone(), *params, v_rho, v_theta, v_phi)
}

/// Way of obtaining the constant in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Route {
    ClosedForm,
    SpectralOracle,
    FieldQuotient,
}

impl Route {
    pub const ALL: [Route; 3] = [Route::ClosedForm, Route::SpectralOracle, Route::FieldQuotient];

    pub fn label(&self) -> &'static str {
        match self {
            Route::ClosedForm => "closed-form",
            Route::SpectralOracle => "spectral-oracle",
            Route::FieldQuotient => "field-quotient",
        }
    }
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Route::ALL
            .into_iter()
            .find(|r| r.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown route '{s}', expected closed-form, spectral-oracle or field-quotient")))
    }
}

/// Grids and tolerances of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub lambda_max: f64,
    pub lambda_points: usize,
    pub nu_max: u32,
    /// Smaller of the two sequence widths; the field route also evaluates `2k`.
    pub k: f64,
    pub nt: usize,
    pub n_theta: usize,
    pub oracle_tol: f64,
    pub field_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            lambda_max: DEFAULT_LAMBDA_MAX,
            lambda_points: DEFAULT_LAMBDA_POINTS,
            nu_max: DEFAULT_NU_MAX,
            k: 16.0,
            nt: 1024,
            n_theta: 64,
            oracle_tol: 1e-6,
            field_tol: 0.05,
        }
    }
}

/// One `(n, gamma, route)` row. Rows that could not be evaluated have no values,
/// `branch = "error"` and the reason in `error`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub gamma: f64,
    pub route: Route,
    #[serde(rename = "C_value")]
    pub c_value: Option<f64>,
    /// Closed-form constant.
    pub target: Option<f64>,
    /// Relative deviation of `c_value` from `target`.
    pub deviation: Option<f64>,
    pub branch: String,
    pub grid: String,
    pub pass: bool,
    #[serde(skip)]
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }
}

/// Field-route estimate of the reduced infimum: for each sequence kind, the quotients at
/// `k` and `2k` are extrapolated as `(4 Q(2k) - Q(k)) / 3`, cancelling the leading
/// `1/k^2` term; the smallest over kinds is returned. Kinds that cannot be built for
/// these parameters are skipped.
pub fn field_infimum(p: &Params, opts: &SweepOptions) -> Result<f64> {
    let grid = sequence_grid(2.0 * opts.k, opts.nt, opts.n_theta);
    let mut best: Option<f64> = None;
    let mut last_err = None;
    for kind in SequenceKind::candidates(p.n()) {
        let eval = |k: f64| -> Result<f64> {
            let spec = MinimizingSequenceSpec::new(kind, k, *p)?;
            Ok(build_minimizing_field(&spec, &grid)?.rayleigh_quotient()?.value)
        };
        match eval(opts.k).and_then(|a| eval(2.0 * opts.k).map(|b| (4.0 * b - a) / 3.0)) {
            Ok(q) => best = Some(best.map_or(q, |b: f64| b.min(q))),
            Err(e) => {
                log::debug!("{kind} skipped at n = {}, gamma = {}: {e}", p.n(), p.gamma());
                last_err = Some(e);
            }
        }
    }
    best.ok_or_else(|| last_err.unwrap_or(Error::ZeroField))
}

fn sweep_row(n: usize, gamma: f64, route: Route, opts: &SweepOptions) -> SweepRow {
    let grid_label = match route {
        Route::ClosedForm => "-".to_string(),
        Route::SpectralOracle => format!("lambda[0,{}]x{} nu<={}", opts.lambda_max, opts.lambda_points, opts.nu_max),
        Route::FieldQuotient => {
            format!("{} k={},{}", sequence_grid(2.0 * opts.k, opts.nt, opts.n_theta), opts.k, 2.0 * opts.k)
        }
    };
    let evaluate = || -> Result<(f64, f64, String)> {
        let p = Params::new(n, gamma)?;
        let closed = sharp_constant(&p);
        let c = match route {
            Route::ClosedForm => closed.c,
            Route::SpectralOracle => {
                let m = brute_force_infimum(&p, opts.lambda_max, opts.nu_max, opts.lambda_points)?;
                1.0 / (p.radial_term() + m.value)
            }
            Route::FieldQuotient => 1.0 / (p.radial_term() + field_infimum(&p, opts)?),
        };
        Ok((c, closed.c, closed.branch.label().to_string()))
    };
    match evaluate() {
        Ok((c, target, branch)) => {
            let deviation = rel_diff(c, target);
            let tol = match route {
                Route::ClosedForm => 0.0,
                Route::SpectralOracle => opts.oracle_tol,
                Route::FieldQuotient => opts.field_tol,
            };
            SweepRow {
                n,
                gamma,
                route,
                c_value: Some(c),
                target: Some(target),
                deviation: Some(deviation),
                branch,
                grid: grid_label,
                pass: deviation <= tol,
                error: None,
            }
        }
        Err(e) => SweepRow {
            n,
            gamma,
            route,
            c_value: None,
            target: None,
            deviation: None,
            branch: "error".into(),
            grid: grid_label,
            pass: false,
            error: Some(e.to_string()),
        },
    }
}

/// Constants for every `(n, gamma)` pair and route, ordered by input position then route.
/// A row that fails to evaluate is reported in place.
pub fn sweep_report(points: &[(usize, f64)], routes: &[Route], opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one (n, gamma) pair".into()));
    }
    if routes.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one route".into()));
    }
    let mut routes = routes.to_vec();
    routes.sort();
    routes.dedup();
    let jobs: Vec<(usize, f64, Route)> =
        points.iter().flat_map(|&(n, g)| routes.iter().map(move |&r| (n, g, r))).collect();
    Ok(jobs.into_par_iter().map(|(n, g, r)| sweep_row(n, g, r, opts)).collect())
}

/// Column order of sweep files.
pub const SWEEP_COLUMNS: [&str; 9] = ["n", "gamma", "route", "C_value", "target", "deviation", "branch", "grid", "pass"];

/// `x` with 17 significant digits, the shortest width that round-trips every `f64`.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.16e}")
}

/// JSON number with 17 significant digits; `None` and non-finite values become `null`.
pub fn json_number(x: Option<f64>) -> serde_json::Value {
    match x.filter(|v| v.is_finite()) {
        Some(v) => serde_json::Value::Number(
            serde_json::Number::from_str(&format_sig17(v)).expect("finite float formats as a JSON number"),
        ),
        None => serde_json::Value::Null,
    }
}

/// Shortest text that parses back to `x`, in exponent form outside `[1e-5, 1e16)`.
pub fn format_shortest(x: f64) -> String {
    if x != 0.0 && x.is_finite() && !(1e-5..1e16).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Writes rows as CSV with the [`SWEEP_COLUMNS`] header, numbers via [`format_shortest`].
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    let opt = |x: Option<f64>| x.map(format_shortest).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.n.to_string(),
            format_shortest(r.gamma),
            r.route.to_string(),
            opt(r.c_value),
            opt(r.target),
            opt(r.deviation),
            r.branch.clone(),
            r.grid.clone(),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows as a JSON array of flat objects keyed by [`SWEEP_COLUMNS`].
pub fn sweep_json(rows: &[SweepRow]) -> serde_json::Value {
    serde_json::Value::Array(
        rows.iter()
            .map(|r| {
                let mut o = serde_json::Map::new();
                o.insert("n".into(), r.n.into());
                o.insert("gamma".into(), json_number(Some(r.gamma)));
                o.insert("route".into(), r.route.label().into());
                o.insert("C_value".into(), json_number(r.c_value));
                o.insert("target".into(), json_number(r.target));
                o.insert("deviation".into(), json_number(r.deviation));
                o.insert("branch".into(), r.branch.clone().into());
                o.insert("grid".into(), r.grid.clone().into());
                o.insert("pass".into(), r.pass.into());
                serde_json::Value::Object(o)
            })
            .collect(),
    )
}

/// Inclusive range `min:max:count`.
pub fn gamma_range(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    match count {
        0 => Err(Error::InvalidArgument("gamma range needs at least one point".into())),
        1 if min == max => Ok(vec![min]),
        1 => Err(Error::InvalidArgument(format!("a single-point range needs min = max, got {min}:{max}"))),
        _ => Ok((0..count).map(|i| min + (max - min) * i as f64 / (count - 1) as f64).collect()),
    }
}
