use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coulomb_gas::cli;
use coulomb_gas::Error;

/// Partition bounds for the neutral Coulomb lattice gas.
#[derive(Parser)]
#[command(name = "coulomb-gas", version, about)]
struct Invocation {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report the tilt, ideal partition function, suppression table,
    /// correlation length, density, and the Gaussian lower bound.
    Compute(RunArgs),
    /// Certify Xi >= Xi2 by exact enumeration; exit 0 iff the bound holds.
    Verify(RunArgs),
    /// Tabulate a one or two variable grid as CSV.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write the document here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn init_threads() -> coulomb_gas::Result<()> {
    let raw = match std::env::var("COULOMB_GAS_THREADS") {
        Ok(raw) => raw,
        // Unset or undecodable: rayon defaults to available parallelism.
        Err(_) => return Ok(()),
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Error::Config(format!("COULOMB_GAS_THREADS must be a positive integer, got {raw:?}"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot size the thread pool: {e}")))
}

fn emit(document: &str, output: Option<&PathBuf>) -> coulomb_gas::Result<()> {
    match output {
        Some(path) => std::fs::write(path, document)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{document}");
            Ok(())
        }
    }
}

fn run(invocation: &Invocation) -> coulomb_gas::Result<(String, u8, &RunArgs)> {
    match &invocation.command {
        Command::Compute(args) => {
            let config = cli::load_config(&args.config)?;
            Ok((cli::run_compute(&config)?, 0, args))
        }
        Command::Verify(args) => {
            let config = cli::load_config(&args.config)?;
            let (document, pass) = cli::run_verify(&config)?;
            Ok((document, if pass { 0 } else { 1 }, args))
        }
        Command::Sweep(args) => {
            let config = cli::load_config(&args.config)?;
            Ok((cli::run_sweep(&config)?, 0, args))
        }
    }
}

fn main() -> ExitCode {
    let invocation = Invocation::parse();
    let outcome = init_threads().and_then(|()| run(&invocation)).and_then(|(doc, code, args)| {
        emit(&doc, args.output.as_ref())?;
        Ok(code)
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(error) => {
            eprint!("{}", cli::error_document(&error));
            ExitCode::from(cli::exit_code(&error) as u8)
        }
    }
}
