use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use viscodyn::cli::{load_scenario, run, verify};
use viscodyn::Error;

#[derive(Parser)]
#[command(name = "viscodyn", version, about = "Isogeometric finite-strain viscoelastodynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads (overridden by VISCODYN_THREADS).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the built-in oracle and property checks.
    Verify,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Io(_) => 2,
        _ => 3,
    }
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, Error> {
    match std::env::var("VISCODYN_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Error::Config(format!("VISCODYN_THREADS: not a thread count: `{v}`"))),
        Err(_) => Ok(flag),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, threads: flag } => {
            let result = threads(flag).and_then(|n| {
                if let Some(n) = n {
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(n)
                        .build_global()
                        .map_err(|e| Error::Config(e.to_string()))?;
                }
                let cfg = load_scenario(&config)?;
                run(&cfg, Some(&out))
            });
            match result {
                Ok(s) => {
                    println!("{} steps, {} Newton iterations, output in {}", s.steps, s.newton_iterations, out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e))
                }
            }
        }
        Command::Verify => {
            let checks = verify::run_checks();
            for c in &checks {
                println!("{} {:<48} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
    }
}
