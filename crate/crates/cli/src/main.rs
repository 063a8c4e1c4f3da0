#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! `fractal-calc`: plot data and checks for fractal calculus on middle-μ
//! Cantor sets.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "fractal-calc", version, about = "Fractal calculus on middle-mu Cantor sets: emits CSV/JSON plot data and stability reports")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Order of the fractal calculus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaArg {
    /// Estimate the γ-dimension from the mass ratio first.
    Auto,
    Value(f64),
}

fn parse_alpha(s: &str) -> Result<AlphaArg, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(AlphaArg::Auto);
    }
    match s.parse::<f64>() {
        Ok(a) if a > 0.0 && a <= 1.0 => Ok(AlphaArg::Value(a)),
        Ok(a) => Err(format!("alpha must lie in (0, 1], got {a}")),
        Err(_) => Err(format!("expected a number or 'auto', got '{s}'")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Removed middle fraction μ of the Cantor construction.
    #[arg(long, global = true, default_value_t = 0.2)]
    pub mu: f64,
    /// Order α, or `auto` for the γ-dimension estimate.
    #[arg(long, global = true, default_value = "auto", value_parser = parse_alpha)]
    pub alpha: AlphaArg,
    /// Construction depth (each command has its own default).
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    /// Right end of the base interval `[0, extent]`.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub extent: f64,
    /// Start time (staircase anchor).
    #[arg(long, global = true, default_value_t = 0.0)]
    pub t0: f64,
    /// End time; defaults to the end of the base interval.
    #[arg(long = "t-end", global = true)]
    pub t_end: Option<f64>,
    /// Step in staircase time.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub dtau: f64,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Table format (default csv; stability reports are always JSON).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Upper bound on the depth; larger requests are clamped.
    #[arg(long = "max-depth", env = "FRACTAL_CALC_MAX_DEPTH", global = true, hide = true)]
    pub max_depth: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Interval endpoints of every construction level: `level,index,a,b`.
    Cantor,
    /// Breakpoints of the integral staircase: `t,s`.
    Staircase,
    /// Mass ratio against α: `alpha,ratio`; the crossing estimate goes to stderr.
    Dimension,
    /// Characteristic function on a uniform grid: `t,chi`.
    Chi {
        /// Number of grid points.
        #[arg(long, default_value_t = 1001)]
        points: usize,
    },
    /// Fractal derivative of `f(t, s)` at every set sample: `t,s,f,derivative`.
    Deriv {
        /// Expression in `t` and `s` (the staircase value).
        #[arg(long, default_value = "s^2")]
        function: String,
    },
    /// Running fractal integral of `f(t, s)` over `[t0, t-end]`: `t,s,f,integral`.
    Integrate {
        #[arg(long, default_value = "1")]
        function: String,
    },
    /// Solves a system given as JSON: `t,tau,y,z`.
    Solve(SystemArgs),
    /// Stability report (JSON) for a system given as JSON.
    Stability {
        #[command(flatten)]
        system: SystemArgs,
        /// Horizon of the perturbed runs, in staircase time.
        #[arg(long, default_value_t = 20.0)]
        horizon: f64,
    },
    /// Built-in systems with their Lyapunov functions:
    /// `run,t,tau,y,z,lyapunov`.
    Demo {
        #[arg(value_enum)]
        model: DemoModel,
        /// Initial state of each run: `h(0)` for `decay`, `D^α y(0)` otherwise.
        #[arg(long = "z0")]
        z0: Vec<f64>,
        /// Initial `y` of the second-order models.
        #[arg(long, default_value_t = 1.0)]
        y0: f64,
        /// Stiffness `c` of the oscillator.
        #[arg(long, default_value_t = 1.0)]
        stiffness: f64,
        /// Add the α = 1 reference curves.
        #[arg(long)]
        classical: bool,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SystemArgs {
    /// Inline JSON or a path to a JSON file.
    #[arg(long)]
    pub system: String,
    /// Add the α = 1 reference curve.
    #[arg(long)]
    pub classical: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoModel {
    /// `D^α h = -h`.
    #[value(alias = "example1")]
    Decay,
    /// `(D^α)² y + y² D^α y + y = 0`.
    #[value(alias = "example2")]
    Lienard,
    /// `(D^α)² y + c y = 0`.
    #[value(alias = "example3")]
    Oscillator,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.common, &cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
