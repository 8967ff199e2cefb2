//! `dunklarr`: command-line front end for deciding whether a weighted
//! hyperplane arrangement carries a Dunkl metric.
//!
//! Exit codes: 0 success (or `dunkl` verdict "dunkl"), 1 verdict "not_dunkl",
//! 2 verdict "not_applicable" or analysis error, 64 usage error, 65 invalid
//! input, 70 internal inconsistency.

mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::Failure;

#[derive(Debug, Parser)]
#[command(name = "dunklarr", version, about = "Dunkl metrics for weighted hyperplane arrangements")]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<std::path::PathBuf>,
    /// Scalar arithmetic; defaults to the mode of the arrangement file.
    #[arg(long, global = true, value_parser = ["exact", "float"])]
    mode: Option<String>,
    /// Include wall-clock seconds per stage (makes reports non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct WeightedInput {
    /// Arrangement JSON file.
    arrangement: std::path::PathBuf,
    /// Weights JSON file `{"weights": [...]}`.
    #[arg(long, value_name = "FILE")]
    weights: std::path::PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a catalog arrangement in the arrangement JSON format.
    Catalog {
        #[arg(long)]
        family: String,
        /// Integer parameters, repeated or comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        param: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Intersection poset summary.
    Analyze {
        arrangement: std::path::PathBuf,
    },
    /// Stability report and the stability cone.
    Stability {
        #[command(flatten)]
        input: WeightedInput,
    },
    /// Hirzebruch form, gradient and critical-point residuals.
    Qform {
        #[command(flatten)]
        input: WeightedInput,
    },
    /// Balanced metric by iterative scaling.
    Balance {
        #[command(flatten)]
        input: WeightedInput,
        #[arg(long, default_value_t = dunkl_core::balance::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = dunkl_core::balance::DEFAULT_MAX_ITER)]
        max_iter: usize,
        /// Skip the stability precheck and iterate regardless.
        #[arg(long)]
        no_precheck: bool,
    },
    /// Full decision with all sub-reports.
    Dunkl {
        #[command(flatten)]
        input: WeightedInput,
        /// Balance tolerance.
        #[arg(long, default_value_t = dunkl_core::balance::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = dunkl_core::balance::DEFAULT_MAX_ITER)]
        max_iter: usize,
        /// Commutator tolerance.
        #[arg(long, default_value_t = dunkl_core::dunkl::TOL_F)]
        tol_f: f64,
    },
    /// Search the critical-point null space for stable weights.
    FindWeights {
        arrangement: std::path::PathBuf,
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Multiplicity count against the line-arrangement bound (d = 3).
    Langer {
        arrangement: std::path::PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { report::EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("dunklarr: {message}");
            ExitCode::from(code)
        }
    }
}
