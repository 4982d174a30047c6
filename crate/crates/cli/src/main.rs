//! `decotime` — scenario-driven decoherence-time analysis.
//!
//! Subcommands:
//!   run <scenario> --out <dir>   full analysis with file outputs
//!   poles <scenario>             pole table on stdout
//!   validate <scenario>          schema and model validation only
//!
//! `--threads` sizes the worker pool; the environment variable
//! `DECOTIME_THREADS` overrides the flag. `--seed` is accepted and reserved
//! (no stochastic stage exists yet); runs are deterministic regardless.

use clap::{Parser, Subcommand};
use decotime_cli::report::render_poles_csv;
use decotime_cli::runner::{poles_only, run_scenario};
use decotime_cli::scenario::{load_scenario, Scenario};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "decotime", version, about = "Decoherence times from poles, formulas and time-domain fits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write report.json (plus series.csv / poles.csv).
    Run {
        scenario: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print the scenario's pole table as CSV on stdout.
    Poles {
        scenario: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check that a scenario file parses and validates.
    Validate { scenario: PathBuf },
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Override both quadrature tolerances with one value.
    #[arg(long)]
    quad_tol: Option<f64>,
    /// Worker threads (DECOTIME_THREADS overrides this flag).
    #[arg(long)]
    threads: Option<usize>,
    /// Reserved; accepted for forward compatibility, currently unused.
    #[arg(long)]
    seed: Option<u64>,
}

fn apply_common(scenario: &mut Scenario, common: &CommonArgs) {
    if let Some(tol) = common.quad_tol {
        scenario.quadrature.abs_tol = tol;
        scenario.quadrature.rel_tol = tol;
    }
}

fn thread_count(common: &CommonArgs) -> Option<usize> {
    if let Ok(value) = std::env::var("DECOTIME_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            if n >= 1 {
                return Some(n);
            }
        }
        eprintln!("ignoring invalid DECOTIME_THREADS={value}");
    }
    common.threads
}

fn in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(job),
        None => job(),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            scenario,
            out,
            common,
        } => {
            let mut sc = match load_scenario(&scenario) {
                Ok(sc) => sc,
                Err(e) => {
                    eprintln!("{e}");
                    std::process::exit(1);
                }
            };
            apply_common(&mut sc, &common);
            let (report, status) = in_pool(thread_count(&common), || run_scenario(&sc, &out));
            if let Some(error) = &report.error {
                eprintln!("error: {error}");
            }
            for warning in report.all_warnings() {
                eprintln!("warning: {warning}");
            }
            status.code()
        }
        Command::Poles { scenario, common } => {
            let mut sc = match load_scenario(&scenario) {
                Ok(sc) => sc,
                Err(e) => {
                    eprintln!("{e}");
                    std::process::exit(1);
                }
            };
            apply_common(&mut sc, &common);
            match in_pool(thread_count(&common), || poles_only(&sc)) {
                Ok(poles) => {
                    print!("{}", render_poles_csv(&poles));
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
        Command::Validate { scenario } => match load_scenario(&scenario) {
            Ok(sc) => {
                println!("ok: {} ({})", sc.name, sc.model.type_name());
                0
            }
            Err(e) => {
                eprintln!("{e}");
                1
            }
        },
    };
    std::process::exit(code);
}
