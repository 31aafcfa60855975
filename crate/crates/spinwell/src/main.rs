use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinwell::commands::{self, Status};
use spinwell::{Error, SimConfig};

/// Spectral-Galerkin simulator for the stochastic Landau–Lifshitz–Gilbert
/// equation coupled to Maxwell's equations.
///
/// Exit codes: 0 success, 1 tolerance failure, 2 configuration error,
/// 3 numerical abort.
#[derive(Parser)]
#[command(name = "spinwell", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Configuration file (`key = value` lines); defaults are used when absent.
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set dt=0.005`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one path; writes trajectory.csv and snapshots/.
    Run(ConfigArgs),
    /// Integrate an ensemble of paths; writes ensemble.csv.
    Ensemble(ConfigArgs),
    /// Check identities and invariants; writes check.csv.
    Check(ConfigArgs),
    /// Refinement studies in dt and modes; writes convergence.csv.
    Convergence(ConfigArgs),
    /// Print the complete configuration with documentation.
    PrintConfig(ConfigArgs),
}

fn execute(command: Command) -> Result<Status, Error> {
    let load = |a: &ConfigArgs| SimConfig::load(a.config.as_deref(), &a.overrides);
    match command {
        Command::Run(a) => {
            let cfg = load(&a)?;
            let traj = commands::run(&cfg)?;
            eprintln!(
                "{} rows written to {}",
                traj.rows.len(),
                cfg.output_dir.join("trajectory.csv").display()
            );
            Ok(Status::Passed)
        }
        Command::Ensemble(a) => {
            let cfg = load(&a)?;
            let stats = commands::ensemble(&cfg)?;
            eprintln!("{} paths aggregated", stats.paths);
            Ok(Status::Passed)
        }
        Command::Check(a) => {
            let cfg = load(&a)?;
            let status = commands::check(&cfg)?;
            if status != Status::Passed {
                eprintln!("tolerance check failed, see {}", cfg.output_dir.join("check.csv").display());
            }
            Ok(status)
        }
        Command::Convergence(a) => {
            let cfg = load(&a)?;
            let status = commands::convergence(&cfg)?;
            if status != Status::Passed {
                eprintln!(
                    "observed order outside its bracket, see {}",
                    cfg.output_dir.join("convergence.csv").display()
                );
            }
            Ok(status)
        }
        Command::PrintConfig(a) => {
            print!("{}", load(&a)?.to_text());
            Ok(Status::Passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
