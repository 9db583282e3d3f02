//! The five subcommands.

use hardy_core::constants::rel_diff;
use hardy_core::energy::rayleigh_quotient;
use hardy_core::grid::{GridSpec, LogRadialGrid};
use hardy_core::planar::{check_corollary2, check_inequality_2d, random_divfree_2d};
use hardy_core::spectral::{DEFAULT_LAMBDA_MAX, DEFAULT_LAMBDA_POINTS, DEFAULT_NU_MAX};
use hardy_core::verify::{
    convergence_ladder, sequence_grid, sweep_json, sweep_report, write_sweep_csv, random_axisym_field,
    MinimizingSequenceSpec, Route, SequenceKind, SweepOptions,
};
use hardy_core::{
    azimuthal_infimum, brute_force_infimum, classical_constant, improvement_ratio, poloidal_infimum, sharp_constant,
    total_infimum, Error, Params,
};
use rayon::prelude::*;

use crate::config::{Command, OutputFormat, RunConfig};
use crate::report::{Cell, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_VERIFY_K: f64 = 8.0;
const DEFAULT_VERIFY_NT: usize = 2048;
const DEFAULT_VERIFY_N_THETA: usize = 64;
const DEFAULT_TRIALS: usize = 100;
const DEFAULT_RANDOM_EPS: f64 = 0.02;
const DEFAULT_SEQUENCE_EPS: f64 = 1e-6;
const ROUTE_AGREEMENT: f64 = 1e-6;

/// Failure that stops a command before it produces output.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::PoleSingularity(_) | Error::ZeroFrequencyResonance { .. } | Error::ZeroField => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Rendered output and the exit code it should end with.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Constant => cmd_constant(cfg),
        Command::Reduce => cmd_reduce(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Sweep => cmd_sweep(cfg),
        Command::RandomTest => cmd_random_test(cfg),
    }
}

fn single_gamma(cfg: &RunConfig) -> Result<f64, CliError> {
    match cfg.gamma.values()?.as_slice() {
        [g] => Ok(*g),
        _ => Err(CliError::Usage(format!("{} takes a single gamma value", cfg.command.name()))),
    }
}

fn finish(report: Report, format: OutputFormat, pass: bool) -> Outcome {
    Outcome { output: report.render(format), code: if pass { EXIT_OK } else { EXIT_NUMERICAL } }
}

pub fn cmd_constant(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut report = Report::new(vec![
        "n",
        "gamma",
        "C",
        "C_inverse",
        "radial_term",
        "angular_infimum",
        "classical",
        "ratio",
        "branch",
    ]);
    for gamma in cfg.gamma.values()? {
        let p = Params::new(cfg.n, gamma)?;
        let b = sharp_constant(&p);
        report.push(vec![
            Cell::Int(cfg.n as u64),
            Cell::num(gamma),
            Cell::num(b.c),
            Cell::num(b.c_inverse),
            Cell::num(b.radial_term),
            Cell::num(b.angular_infimum),
            Cell::num(classical_constant(&p)),
            Cell::num(improvement_ratio(&p)),
            Cell::text(b.branch.label()),
        ]);
    }
    Ok(finish(report, cfg.output, true))
}

pub fn cmd_reduce(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tol = cfg.tolerances.oracle_tol.unwrap_or(ROUTE_AGREEMENT);
    let mut report = Report::new(vec![
        "n",
        "gamma",
        "closed_form",
        "oracle",
        "deviation",
        "lambda",
        "nu",
        "family",
        "poloidal",
        "azimuthal",
        "branch",
        "pass",
    ]);
    let mut all_pass = true;
    for gamma in cfg.gamma.values()? {
        let p = Params::new(cfg.n, gamma)?;
        let closed = total_infimum(&p);
        let m = brute_force_infimum(&p, DEFAULT_LAMBDA_MAX, DEFAULT_NU_MAX, DEFAULT_LAMBDA_POINTS)?;
        let deviation = rel_diff(m.value, closed);
        let pass = deviation <= tol;
        all_pass &= pass;
        report.push(vec![
            Cell::Int(cfg.n as u64),
            Cell::num(gamma),
            Cell::num(closed),
            Cell::num(m.value),
            Cell::num(deviation),
            Cell::num(m.lambda),
            Cell::Int(m.nu as u64),
            Cell::text(format!("{:?}", m.family)),
            Cell::Num(poloidal_infimum(&p).ok()),
            Cell::Num(azimuthal_infimum(&p).ok()),
            Cell::text(sharp_constant(&p).branch.label()),
            Cell::Bool(pass),
        ]);
    }
    Ok(finish(report, cfg.output, all_pass))
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let gamma = single_gamma(cfg)?;
    let p = Params::new(cfg.n, gamma)?;
    let k = cfg.grid.k.unwrap_or(DEFAULT_VERIFY_K);
    let ks = [k, 2.0 * k, 4.0 * k];
    let mut grid = sequence_grid(
        4.0 * k,
        cfg.grid.nt.unwrap_or(DEFAULT_VERIFY_NT),
        cfg.grid.n_theta.unwrap_or(DEFAULT_VERIFY_N_THETA),
    );
    grid.t_min = cfg.grid.t_min.unwrap_or(grid.t_min);
    grid.t_max = cfg.grid.t_max.unwrap_or(grid.t_max);
    let kind = SequenceKind::optimal(&p);
    let spec = MinimizingSequenceSpec::new(kind, k, p)?;
    let rows = convergence_ladder(&spec, &ks, &grid)?;
    let eps = cfg.tolerances.eps.unwrap_or(DEFAULT_SEQUENCE_EPS);
    let limit = kind.limit(&p)?;
    let c_inverse = sharp_constant(&p).c_inverse;

    let mut report = Report::new(vec![
        "n", "gamma", "kind", "k", "quotient", "limit", "gap", "ratio", "C_inverse_estimate", "C_inverse",
    ]);
    let mut pass = true;
    for r in &rows {
        pass &= r.value >= limit * (1.0 - eps) && r.ratio.is_none_or(|x| x > 1.0);
        report.push(vec![
            Cell::Int(cfg.n as u64),
            Cell::num(gamma),
            Cell::text(kind.label()),
            Cell::num(r.k),
            Cell::num(r.value),
            Cell::num(limit),
            Cell::num(r.gap),
            Cell::Num(r.ratio),
            Cell::num(p.radial_term() + r.value),
            Cell::num(c_inverse),
        ]);
    }
    report.notes.push(format!("grid {grid}"));
    report.notes.push(format!("verdict {}", if pass { "PASS" } else { "FAIL" }));
    Ok(finish(report, cfg.output, pass))
}

pub fn cmd_random_test(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let gamma = single_gamma(cfg)?;
    let p = Params::new(cfg.n, gamma)?;
    let trials = cfg.grid.trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let seed = cfg.grid.seed.unwrap_or(0);
    let eps = cfg.tolerances.eps.unwrap_or(DEFAULT_RANDOM_EPS);
    let seeds: Vec<u64> = (0..trials as u64).map(|i| seed.wrapping_add(i)).collect();
    let bumps = |s: u64| 1 + (s % 5) as usize;

    // (quotient, target, route deviation)
    let results: Vec<(f64, f64, Option<f64>)> = if p.is_planar() {
        seeds
            .par_iter()
            .map(|&s| -> Result<_, Error> {
                let f = random_divfree_2d(s, bumps(s), &p)?;
                let a = check_inequality_2d(&f)?;
                let b = check_corollary2(&f)?;
                Ok((a.value, a.target, Some(rel_diff(a.value, b.value))))
            })
            .collect::<Result<_, _>>()?
    } else {
        let spec = GridSpec {
            nt: cfg.grid.nt.unwrap_or(1024),
            n_theta: cfg.grid.n_theta.unwrap_or(64),
            t_min: cfg.grid.t_min.unwrap_or(-12.0),
            t_max: cfg.grid.t_max.unwrap_or(12.0),
        };
        let grid = LogRadialGrid::from_spec(&spec, p.n())?;
        seeds
            .par_iter()
            .map(|&s| -> Result<_, Error> {
                let v = random_axisym_field(s, bumps(s), &p, &grid)?;
                let q = rayleigh_quotient(&v)?;
                Ok((q.value, q.target, None))
            })
            .collect::<Result<_, _>>()?
    };

    let target = results[0].1;
    let min_q = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let max_dev = results.iter().filter_map(|r| r.2).fold(None, |a: Option<f64>, d| Some(a.map_or(d, |x| x.max(d))));
    let pass = min_q >= target * (1.0 - eps) && max_dev.is_none_or(|d| d <= ROUTE_AGREEMENT);

    let mut report = Report::new(vec![
        "n",
        "gamma",
        "trials",
        "seed",
        "min_quotient",
        "target",
        "min_ratio",
        "max_route_deviation",
        "eps",
        "pass",
    ]);
    report.push(vec![
        Cell::Int(cfg.n as u64),
        Cell::num(gamma),
        Cell::Int(trials as u64),
        Cell::Int(seed),
        Cell::num(min_q),
        Cell::num(target),
        Cell::num(min_q / target),
        Cell::Num(max_dev),
        Cell::num(eps),
        Cell::Bool(pass),
    ]);
    Ok(finish(report, cfg.output, pass))
}

fn parse_routes(s: &str) -> Result<Vec<Route>, CliError> {
    if s.trim() == "all" {
        return Ok(Route::ALL.to_vec());
    }
    let routes = s
        .split(',')
        .map(|r| r.trim())
        .filter(|r| !r.is_empty())
        .map(str::parse::<Route>)
        .collect::<Result<Vec<_>, _>>()?;
    if routes.is_empty() {
        return Err(CliError::Usage("--routes needs at least one route".into()));
    }
    Ok(routes)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let routes = parse_routes(&cfg.routes)?;
    let points: Vec<(usize, f64)> = cfg.gamma.values()?.into_iter().map(|g| (cfg.n, g)).collect();
    let defaults = SweepOptions::default();
    let opts = SweepOptions {
        k: cfg.grid.k.unwrap_or(defaults.k),
        nt: cfg.grid.nt.unwrap_or(defaults.nt),
        n_theta: cfg.grid.n_theta.unwrap_or(defaults.n_theta),
        oracle_tol: cfg.tolerances.oracle_tol.unwrap_or(defaults.oracle_tol),
        field_tol: cfg.tolerances.field_tol.unwrap_or(defaults.field_tol),
        ..defaults
    };
    let rows = sweep_report(&points, &routes, &opts)?;
    for r in rows.iter().filter(|r| r.is_error()) {
        log::warn!("n = {}, gamma = {}, {}: {}", r.n, r.gamma, r.route, r.error.as_deref().unwrap_or(""));
    }
    let output = match cfg.output {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            write_sweep_csv(&rows, &mut buf)?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&sweep_json(&rows)).expect("json values serialize");
            s.push('\n');
            s
        }
        OutputFormat::Table => {
            let mut report = Report::new(hardy_core::verify::SWEEP_COLUMNS.to_vec());
            for r in &rows {
                report.push(vec![
                    Cell::Int(r.n as u64),
                    Cell::num(r.gamma),
                    Cell::text(r.route.label()),
                    Cell::Num(r.c_value),
                    Cell::Num(r.target),
                    Cell::Num(r.deviation),
                    Cell::text(r.branch.clone()),
                    Cell::text(r.grid.clone()),
                    Cell::Bool(r.pass),
                ]);
            }
            for r in rows.iter().filter(|r| r.is_error()) {
                report.notes.push(format!(
                    "error at n = {}, gamma = {}, {}: {}",
                    r.n,
                    r.gamma,
                    r.route,
                    r.error.as_deref().unwrap_or("")
                ));
            }
            report.render(OutputFormat::Table)
        }
    };
    let code = if rows.iter().all(|r| r.is_error()) {
        EXIT_USAGE
    } else if rows.iter().any(|r| !r.is_error() && !r.pass) {
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    };
    Ok(Outcome { output, code })
}
