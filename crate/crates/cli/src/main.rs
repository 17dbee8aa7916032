//! Command-line experiment runner for average shadowing of IFS.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Params, Resolved};
use error::CliError;

#[derive(Parser)]
#[command(name = "ifs-shadow", version, about, long_about = None)]
struct Cli {
    /// TOML file with default settings; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a noisy average pseudo-orbit, or validate one with --input
    Orbit(Params),
    /// Constructive shadow of a generated pseudo-orbit, checked against a brute-force oracle
    Shadow(Params),
    /// Doubling-block orbit on the circle that no point average-shadows
    Counterexample(Params),
    /// Box-graph approximation of the chain-recurrent set
    Chainrec(Params),
    /// Chaos-game points and a greyscale image
    Attractor(Params),
    /// Catalog systems and their properties
    ListExamples,
    /// Run every acceptance criterion
    Verify(Params),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => config::load_file(path)?,
        None => Params::default(),
    };
    let resolve = |p: Params| Resolved::new(p.overlay(file.clone()));
    match cli.command {
        Command::Orbit(p) => commands::orbit(&mut resolve(p)),
        Command::Shadow(p) => commands::shadow(&mut resolve(p)),
        Command::Counterexample(p) => commands::counterexample(&mut resolve(p)),
        Command::Chainrec(p) => commands::chainrec(&mut resolve(p)),
        Command::Attractor(p) => commands::attractor(&mut resolve(p)),
        Command::ListExamples => commands::list_examples(),
        Command::Verify(p) => commands::verify(&mut resolve(p)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
