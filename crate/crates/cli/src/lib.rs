//! Command-line front end for HP-spline fitting.
//!
//! ```text
//! hpspline fit  --input data.csv --alpha 1 [--knots N] [--lambda L | --select gcv|lcurve|discrepancy]
//!               [--noise-level S] [--output model.json] [--format json|csv] [--grid-points 200]
//! hpspline demo --figure 1|2 --panel 1|2|3 [--seed N] --outdir DIR
//! hpspline eval --model model.json (--at X... | --grid N) [--output PATH]
//! ```
//!
//! Exit codes: 0 success, 2 bad input or usage, 3 singular or otherwise
//! unsolvable fit, 4 evaluation or data outside the model domain, 1 write
//! failure.

pub mod commands;
pub mod dataset;
pub mod error;
pub mod model_file;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{cmd_demo, cmd_eval, cmd_fit, write_demo, DemoFiles};
pub use error::{CliError, CliResult};
pub use model_file::ModelFile;
pub use output::TableFormat;

#[derive(Debug, Parser)]
#[command(name = "hpspline", version, about = "Fit, evaluate and demo HP-splines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a CSV dataset and write the model, fitted values and a dense curve.
    Fit(FitArgs),
    /// Regenerate the data behind one figure panel.
    Demo(DemoArgs),
    /// Evaluate a saved model.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Gcv,
    Lcurve,
    Discrepancy,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::Gcv => "gcv",
            Self::Lcurve => "lcurve",
            Self::Discrepancy => "discrepancy",
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// `x,y[,w]` CSV, optional header row.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Knot count; defaults to max(4, m/4 + 1).
    #[arg(long)]
    pub knots: Option<usize>,
    /// Fixed smoothing parameter (default 1 when --select is absent).
    #[arg(long, conflicts_with = "select")]
    pub lambda: Option<f64>,
    #[arg(long, value_enum)]
    pub select: Option<Method>,
    /// Noise standard deviation for --select discrepancy.
    #[arg(long)]
    pub noise_level: Option<f64>,
    /// Model file path; tables go next to it. Defaults to `<input>.model.json`.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: TableFormat,
    #[arg(long, default_value_t = 200)]
    pub grid_points: usize,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub figure: u8,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub panel: u8,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub outdir: PathBuf,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("sites").required(true).args(["at", "grid"]))]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub at: Option<Vec<f64>>,
    /// Evaluate at N uniform points on [a, b].
    #[arg(long)]
    pub grid: Option<usize>,
    /// Write the `x,s` table here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Fit(args) => cmd_fit(args, out),
        Command::Demo(args) => cmd_demo(args, out),
        Command::Eval(args) => cmd_eval(args, out),
    }
}
