//! Command-line front end: parse a scenario config, run it, and write CSV
//! artifacts. All substance lives in the library; this binary only maps
//! verbs to library calls and errors to exit codes (0 success, 1 failed
//! self-test, 2 positivity violation, 3 config or runtime trouble).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tstransport::scenario::{exit_code, run_convergence, run_scenario, run_selftest, Preset};

#[derive(Parser)]
#[command(
    name = "tstransport",
    version,
    about = "Exact transport on time scales: fields, sections, conservation audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the scenario in CONFIG and write its artifacts.
    Solve {
        config: PathBuf,
        /// Directory for the output files (created if missing).
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Override the config's spatial window tolerance.
        #[arg(long)]
        tail_tol: Option<f64>,
        /// Override the config's quadrature tolerance.
        #[arg(long)]
        quad_tol: Option<f64>,
    },
    /// Run the lattice-refinement convergence study in CONFIG.
    Converge {
        config: PathBuf,
        /// Directory for convergence.csv (created if missing).
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Run the built-in verification suite (eight checks, five scales).
    Selftest,
    /// Print a ready-to-edit preset config to standard output.
    DumpConfig {
        /// One of: poisson, bernoulli, harmonic, stopstart.
        preset: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve {
            config,
            out_dir,
            tail_tol,
            quad_tol,
        } => match run_scenario(&config, &out_dir, tail_tol, quad_tol) {
            Ok(outcome) => {
                for w in &outcome.warnings {
                    eprintln!("warning: {w}");
                }
                for f in &outcome.files {
                    println!("wrote {}", f.display());
                }
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        },
        Command::Converge { config, out_dir } => match run_convergence(&config, &out_dir) {
            Ok(outcome) => {
                for f in &outcome.files {
                    println!("wrote {}", f.display());
                }
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        },
        Command::Selftest => run_selftest(),
        Command::DumpConfig { preset } => match Preset::from_name(&preset) {
            Ok(p) => {
                print!("{}", p.dump());
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                3
            }
        },
    };
    ExitCode::from(code as u8)
}
