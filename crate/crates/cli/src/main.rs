//! `distortia`: evaluate distortion semigroups, acceptability indices and
//! their diagnostics from the command line.

mod commands;
mod json;
mod values;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "distortia", version, about = "Concave distortion semigroups and acceptability indices")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate Psi_t(x) over a grid of times and points.
    Psi {
        /// Generator spec, e.g. `cvar`, `dual(aimax)`, `mix(wang,knots:g.csv)`.
        #[arg(long)]
        semigroup: String,
        /// Times: `a,b,...` or `start:stop:count`.
        #[arg(long)]
        t: String,
        /// Points in [0, 1]: `a,b,...` or `start:stop:count`.
        #[arg(long)]
        x: String,
    },
    /// Acceptability index of a P&L sample.
    Index {
        #[arg(long)]
        semigroup: String,
        /// CSV with header `pnl[,weight]`.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, default_value_t = distortia::acceptability::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = distortia::acceptability::DEFAULT_T_MAX)]
        t_max: f64,
    },
    /// Sharpe ratio, RAROC, gain-loss ratio and distorted RAROC of a sample.
    Measures {
        #[arg(long)]
        samples: PathBuf,
        /// Quantile level of the RAROC denominator.
        #[arg(long, default_value_t = distortia::acceptability::DEFAULT_RAROC_LEVEL)]
        lambda: f64,
        /// Distortion used by the distorted RAROC.
        #[arg(long, default_value = "clamp(20)")]
        craroc: String,
    },
    /// Recover the generator of a distortion and judge whether one exists.
    Log {
        /// `pow(p)`, `clamp(c)`, `draws(k)`, `wang(t)`, `flow(spec,t)`, `dual(...)`
        /// or a CSV table `x,psi`.
        #[arg(long)]
        distortion: String,
        /// Evaluation points in (0, 1); a dense default grid when omitted.
        #[arg(long)]
        grid: Option<String>,
        /// Write the recovered knots as CSV `x,g`.
        #[arg(long)]
        knots_out: Option<PathBuf>,
        /// Cap on compositions per point.
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// Diagnose properties I to IV for a list of generators.
    Props {
        /// Generator specs.
        specs: Vec<String>,
        /// Ignore closed forms and judge every generator numerically.
        #[arg(long)]
        numeric: bool,
    },
    /// Maximize the index over portfolio directions on the unit sphere.
    Portfolio {
        #[arg(long)]
        semigroup: String,
        /// CSV with header `p,asset1,...`.
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(long, default_value_t = 16)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = distortia::acceptability::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = distortia::acceptability::DEFAULT_T_MAX)]
        t_max: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
