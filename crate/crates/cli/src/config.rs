//! Command-line arguments and the run configuration they resolve to.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Constant,
    Reduce,
    Verify,
    Sweep,
    RandomTest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constant => "constant",
            Command::Reduce => "reduce",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
            Command::RandomTest => "random-test",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(&self) -> &'static str {
        match self {
            OutputFormat::Table => "table",
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// A single exponent or the inclusive range `min:max:count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaSpec {
    Value(f64),
    Range { min: f64, max: f64, count: usize },
}

impl GammaSpec {
    pub fn values(&self) -> hardy_core::Result<Vec<f64>> {
        match *self {
            GammaSpec::Value(g) => Ok(vec![g]),
            GammaSpec::Range { min, max, count } => hardy_core::verify::gamma_range(min, max, count),
        }
    }
}

impl FromStr for GammaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("invalid number '{p}': {e}"));
        match parts.as_slice() {
            [v] => Ok(GammaSpec::Value(num(v)?)),
            [a, b, c] => Ok(GammaSpec::Range {
                min: num(a)?,
                max: num(b)?,
                count: c.trim().parse().map_err(|e| format!("invalid count '{c}': {e}"))?,
            }),
            _ => Err(format!("expected a number or min:max:count, got '{s}'")),
        }
    }
}

impl fmt::Display for GammaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaSpec::Value(g) => write!(f, "{g}"),
            GammaSpec::Range { min, max, count } => write!(f, "{min}:{max}:{count}"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize, Args)]
pub struct GridOverrides {
    /// Samples along t (power of two).
    #[arg(long)]
    pub nt: Option<usize>,
    /// Gauss-Legendre nodes in theta.
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    /// Width of the first minimizing-sequence profile.
    #[arg(short = 'k', long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize, Args)]
pub struct Tolerances {
    /// Relative slack allowed below the target quotient.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Closed form vs spectral oracle.
    #[arg(long)]
    pub oracle_tol: Option<f64>,
    /// Closed form vs field quotient.
    #[arg(long)]
    pub field_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct RunArgs {
    /// Dimension.
    #[arg(short = 'n', long = "dim")]
    pub n: usize,
    /// Weight exponent, or min:max:count.
    #[arg(short = 'g', long = "gamma", allow_hyphen_values = true)]
    pub gamma: GammaSpec,
    #[command(flatten)]
    pub grid: GridOverrides,
    #[command(flatten)]
    pub tolerances: Tolerances,
    /// Sweep routes: all, or a comma list of closed-form, spectral-oracle, field-quotient.
    #[arg(long, default_value = "all")]
    pub routes: String,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Sharp constant, its breakdown and the classical constant.
    Constant(RunArgs),
    /// Closed-form angular infimum against the brute-force spectral scan.
    Reduce(RunArgs),
    /// Minimizing-sequence quotients for k, 2k, 4k.
    Verify(RunArgs),
    /// Constants over a range of exponents by several routes.
    Sweep(RunArgs),
    /// Quotients of random divergence-free fields against the sharp value.
    RandomTest(RunArgs),
}

#[derive(Debug, Parser)]
#[command(name = "hardy-leray", version, about = "Sharp Hardy-Leray constants for divergence-free fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
    /// Output format; defaults to the extension of --out, else table.
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    /// Write results to this file instead of stdout.
    #[arg(short = 'o', long = "out", global = true)]
    pub out: Option<PathBuf>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
}

/// Everything a command needs, independent of how it was given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub gamma: GammaSpec,
    pub grid: GridOverrides,
    pub tolerances: Tolerances,
    pub routes: String,
    pub output: OutputFormat,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Self {
        let (command, args) = match cli.command {
            Sub::Constant(a) => (Command::Constant, a),
            Sub::Reduce(a) => (Command::Reduce, a),
            Sub::Verify(a) => (Command::Verify, a),
            Sub::Sweep(a) => (Command::Sweep, a),
            Sub::RandomTest(a) => (Command::RandomTest, a),
        };
        let from_ext = cli.out.as_ref().and_then(|p| match p.extension()?.to_str()? {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        });
        Self {
            command,
            n: args.n,
            gamma: args.gamma,
            grid: args.grid,
            tolerances: args.tolerances,
            routes: args.routes,
            output: cli.output.or(from_ext).unwrap_or(OutputFormat::Table),
            out: cli.out,
        }
    }

    pub fn parse_from<I, T>(args: I) -> Result<(Self, bool), clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args)?;
        let print = cli.print_config;
        Ok((Self::from_cli(cli), print))
    }

    /// Command line that parses back to this configuration.
    pub fn to_args(&self) -> Vec<String> {
        let mut a = vec!["hardy-leray".to_string(), self.command.name().to_string()];
        let mut push = |flag: &str, v: String| {
            a.push(flag.to_string());
            a.push(v);
        };
        push("-n", self.n.to_string());
        push("-g", self.gamma.to_string());
        let g = &self.grid;
        if let Some(v) = g.nt {
            push("--nt", v.to_string());
        }
        if let Some(v) = g.n_theta {
            push("--n-theta", v.to_string());
        }
        if let Some(v) = g.t_min {
            push("--t-min", v.to_string());
        }
        if let Some(v) = g.t_max {
            push("--t-max", v.to_string());
        }
        if let Some(v) = g.k {
            push("-k", v.to_string());
        }
        if let Some(v) = g.seed {
            push("--seed", v.to_string());
        }
        if let Some(v) = g.trials {
            push("--trials", v.to_string());
        }
        let t = &self.tolerances;
        if let Some(v) = t.eps {
            push("--eps", v.to_string());
        }
        if let Some(v) = t.oracle_tol {
            push("--oracle-tol", v.to_string());
        }
        if let Some(v) = t.field_tol {
            push("--field-tol", v.to_string());
        }
        push("--routes", self.routes.clone());
        push("--output", self.output.name().to_string());
        if let Some(p) = &self.out {
            push("--out", p.display().to_string());
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::parse_from(args).unwrap().0
    }

    #[test]
    fn gamma_spec_forms() {
        assert_eq!("-0.5".parse::<GammaSpec>().unwrap(), GammaSpec::Value(-0.5));
        assert_eq!("-3:3:121".parse::<GammaSpec>().unwrap(), GammaSpec::Range { min: -3.0, max: 3.0, count: 121 });
        assert!("1:2".parse::<GammaSpec>().is_err());
        assert!("a".parse::<GammaSpec>().is_err());
    }

    #[test]
    fn round_trip_through_args_and_json() {
        for line in [
            vec!["hardy-leray", "constant", "-n", "3", "-g", "0"],
            vec!["hardy-leray", "sweep", "-n", "3", "-g", "-3:3:121", "--routes", "all", "-o", "out.csv"],
            vec!["hardy-leray", "--output", "json", "random-test", "-n", "2", "-g", "-1", "--trials", "5", "--seed", "7", "--eps", "0.01"],
            vec!["hardy-leray", "verify", "-n", "3", "-g", "0.25", "-k", "8", "--nt", "1024", "--t-min", "-90", "--t-max", "90"],
        ] {
            let cfg = parse(&line);
            assert_eq!(parse(&cfg.to_args().iter().map(String::as_str).collect::<Vec<_>>()), cfg);
            let json = serde_json::to_string(&cfg).unwrap();
            assert_eq!(serde_json::from_str::<RunConfig>(&json).unwrap(), cfg);
        }
    }

    #[test]
    fn output_from_extension() {
        assert_eq!(parse(&["x", "sweep", "-n", "3", "-g", "0", "-o", "a.json"]).output, OutputFormat::Json);
        assert_eq!(parse(&["x", "sweep", "-n", "3", "-g", "0", "-o", "a.json", "--output", "csv"]).output, OutputFormat::Csv);
        assert_eq!(parse(&["x", "constant", "-n", "3", "-g", "0"]).output, OutputFormat::Table);
    }
}
