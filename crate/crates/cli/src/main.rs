//! `lrbec`: experiments on condensates with long-range interactions.
//!
//! Every subcommand writes one tab-separated table (`--out`) and a TOML
//! manifest next to it. Exit status is 0 on success (including runs that end
//! in a physical collapse or escape), 1 for bad flags, config documents or
//! files, and 2 when the physics admits no answer, e.g. a stationary branch
//! requested beyond the fold. `LRBEC_WORKERS` bounds the worker pool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cmd;
mod config;
mod error;
mod manifest;
mod table;
mod units;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use cmd::Experiment;
use error::{usage, CliResult};
use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "lrbec", version = manifest::VERSION, about = "Condensates with long-range interactions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fixed points of the 1/r gas over a scattering-length range.
    BifurcateMono(cmd::variational::BifurcateMono),
    /// Fixed points of the dipolar gas over a scattering-length range.
    BifurcateDip(cmd::variational::BifurcateDip),
    /// Raster of the dipolar variational potential.
    Landscape(cmd::variational::Landscape),
    /// Phase-space orbits of the 1/r gas.
    Portrait(cmd::dynamics::Portrait),
    /// Poincaré section of the dipolar gas.
    Poincare(cmd::dynamics::Poincare),
    /// Lyapunov classification of section seeds over several energies.
    ClassifySweep(cmd::dynamics::ClassifySweep),
    /// Stationary orbital of the radial grid equation.
    Stationary(cmd::radial::Stationary),
    /// Real-time evolution of a perturbed stationary orbital.
    Evolve(cmd::radial::Evolve),
}

fn command() -> clap::Command {
    Cli::command().mut_subcommands(|c| c.allow_negative_numbers(true))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match command().try_get_matches_from(&argv).and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::BifurcateMono(x) => execute("bifurcate-mono", x, &argv),
        Command::BifurcateDip(x) => execute("bifurcate-dip", x, &argv),
        Command::Landscape(x) => execute("landscape", x, &argv),
        Command::Portrait(x) => execute("portrait", x, &argv),
        Command::Poincare(x) => execute("poincare", x, &argv),
        Command::ClassifySweep(x) => execute("classify-sweep", x, &argv),
        Command::Stationary(x) => execute("stationary", x, &argv),
        Command::Evolve(x) => execute("evolve", x, &argv),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lrbec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn workers() -> CliResult<usize> {
    match std::env::var("LRBEC_WORKERS") {
        Err(_) => Ok(rayon::current_num_threads()),
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| usage(format!("LRBEC_WORKERS must be a positive integer, got `{v}`")))?;
            if n == 0 {
                return Err(usage("LRBEC_WORKERS must be a positive integer, got `0`"));
            }
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| usage(e.to_string()))?;
            Ok(n)
        }
    }
}

fn execute<E: Experiment>(name: &str, flags: E, argv: &[String]) -> CliResult<()> {
    let run = match &flags.common().config {
        Some(path) => {
            let sub = command();
            let sub = sub.find_subcommand(name).expect("registered subcommand");
            config::overlay(&flags, sub, config::read_document(path)?, path)?
        }
        None => flags,
    };
    let out = run.common().out.clone().ok_or_else(|| usage("--out is required (flag or config key `out`)"))?;
    let sidecar = manifest::sidecar(&out);
    let overwrite = run.common().overwrite;
    let mut targets = vec![out.as_path(), sidecar.as_path()];
    targets.extend(run.extra_outputs());
    manifest::ensure_fresh(&targets, overwrite)?;
    let workers = workers()?;

    let started = manifest::timestamp();
    let report = run.run(&out)?;
    let finished = manifest::timestamp();
    RunManifest {
        command: name.to_owned(),
        argv: argv.to_vec(),
        version: manifest::VERSION.to_owned(),
        output: out.display().to_string(),
        started,
        finished,
        workers,
        config: config::resolved(&run),
        parameters: report.parameters,
        termination: report.termination,
    }
    .write(&sidecar, overwrite)
}
