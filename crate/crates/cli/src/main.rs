//! `arr`: invariants of central hyperplane arrangements from the command line.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use arr_core::error::ArrError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "arr", version, about = "Exact invariants of central hyperplane arrangements")]
struct Cli {
    /// Write a machine-readable report to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum MapArg {
    Euler,
    Ziegler,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Characteristic polynomial and Betti numbers.
    Chi { file: String },
    /// Intersection lattice by codimension, with Möbius values.
    Lattice { file: String },
    /// b2-equality ledger along a hyperplane.
    B2 {
        file: String,
        #[arg(long)]
        pivot: String,
    },
    /// Ziegler restriction onto a hyperplane.
    Ziegler {
        file: String,
        #[arg(long)]
        pivot: String,
    },
    /// Saito-certified freeness.
    Free {
        file: String,
        #[arg(long)]
        degree_bound: Option<u32>,
    },
    /// Projective dimension of the derivation module.
    #[command(group(ArgGroup::new("mode").required(true).args(["exact", "infer", "both"])))]
    Pd {
        file: String,
        /// Minimal free resolution.
        #[arg(long)]
        exact: bool,
        /// Certificate-producing inference.
        #[arg(long)]
        infer: bool,
        /// Both, cross-checked.
        #[arg(long)]
        both: bool,
    },
    /// DF, SF and IPD membership.
    Classify {
        file: String,
        /// Only try this IPD level.
        #[arg(long)]
        ipd: Option<usize>,
    },
    /// Euler restriction onto a hyperplane.
    Restrict {
        file: String,
        #[arg(long)]
        pivot: String,
    },
    /// Localization at a flat given by rows of defining forms, e.g. "1 0 0; 0 1 0".
    Localize {
        file: String,
        #[arg(long)]
        flat: String,
    },
    /// Minimal free resolution of the derivation module.
    Resolve { file: String },
    /// Surjectivity of the Euler or Ziegler restriction map.
    Surject {
        file: String,
        #[arg(long)]
        pivot: String,
        #[arg(long, value_enum)]
        map: MapArg,
    },
    /// Replay every certificate in a certificate or report file.
    Verify { cert: PathBuf },
    /// Built-in example arrangements.
    Examples {
        #[command(subcommand)]
        action: Option<ExamplesCmd>,
    },
}

#[derive(Subcommand)]
pub enum ExamplesCmd {
    List,
    /// Print an example in the arrangement text format.
    Dump { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.cmd) {
        Ok(report) => {
            print!("{}", report.text);
            if let Some(path) = &cli.json {
                if let Err(err) = report.write_json(path) {
                    eprintln!("error: {err:#}");
                    return ExitCode::from(1);
                }
            }
            if report.inconclusive {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<ArrError>() {
                Some(ArrError::Inconclusive(_)) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
