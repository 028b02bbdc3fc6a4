//! Thin command-line front end; all logic lives in the library.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use landau::config::load_config;
use landau::runner::{self, RunOptions};

#[derive(Parser)]
#[command(
    name = "landau",
    about = "Deterministic particle solver for the spatially homogeneous multispecies Landau equation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario to its final time, writing diagnostics.csv, snapshots,
    /// and summary.json.
    Run {
        /// Scenario file (TOML).
        config: PathBuf,
        /// Use the desk-scale sibling (`<name>_desk.toml`) of the scenario.
        #[arg(long)]
        desk: bool,
        /// Worker threads (default: LANDAU_THREADS, then all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory override.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence study against the exact solution: run the scenario at
    /// several resolutions and fit the error order.
    Convergence {
        /// Scenario file (TOML) with bkw initial data.
        config: PathBuf,
        /// Comma-separated per-axis cell counts, e.g. --n 20,30,40.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a scenario file and print its derived quantities.
    CheckConfig {
        /// Scenario file (TOML).
        config: PathBuf,
    },
}

/// Phase of failure decides the exit code: 1 for configuration problems,
/// 2 for runtime failures.
enum Failure {
    Config(landau::Error),
    Runtime(landau::Error),
}

fn desk_path(path: &Path) -> Result<PathBuf, Failure> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    if stem.ends_with("_desk") {
        return Ok(path.to_path_buf());
    }
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("toml");
    let sibling = path.with_file_name(format!("{stem}_desk.{ext}"));
    if sibling.exists() {
        Ok(sibling)
    } else {
        Err(Failure::Config(landau::Error::Validation(vec![format!(
            "no desk variant next to {}: expected {}",
            path.display(),
            sibling.display()
        )])))
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run {
            config,
            desk,
            threads,
            out,
        } => {
            let path = if desk { desk_path(&config)? } else { config };
            let config = load_config(&path).map_err(Failure::Config)?;
            let options = RunOptions {
                out_dir: out,
                threads: runner::resolve_threads(threads),
            };
            let result = runner::run(&config, &options).map_err(Failure::Runtime)?;
            let s = &result.summary;
            println!(
                "{}: {} steps to t = {} in {:.1} s",
                path.display(),
                s.steps,
                s.t_final,
                s.wall_clock_sec
            );
            println!(
                "  momentum drift {:.3e} (relative {:.3e}), energy drift {:.3e}, mass exact: {}",
                s.drift.momentum_abs, s.drift.momentum_rel, s.drift.energy_rel, s.drift.mass_exact
            );
            println!(
                "  entropy {:.6} -> {:.6} (max step increase {:.3e})",
                s.drift.entropy_initial, s.drift.entropy_final, s.drift.entropy_max_increase
            );
            for f in &s.final_species {
                println!(
                    "  {}: u = {:?}, T = {:.6}",
                    f.label, f.bulk_velocity, f.temperature
                );
            }
            println!("  wrote {}", result.out_dir.display());
            Ok(())
        }
        Command::Convergence {
            config,
            n,
            threads,
            out,
        } => {
            let config = load_config(&config).map_err(Failure::Config)?;
            let options = RunOptions {
                out_dir: out,
                threads: runner::resolve_threads(threads),
            };
            let study = runner::convergence(&config, &n, &options).map_err(|e| {
                if e.is_config_error() {
                    Failure::Config(e)
                } else {
                    Failure::Runtime(e)
                }
            })?;
            println!("n, species, h, rel_l1, rel_l2, rel_linf");
            for e in &study.entries {
                println!(
                    "{}, {}, {:.6}, {:.6e}, {:.6e}, {:.6e}",
                    e.n,
                    e.species + 1,
                    e.h,
                    e.rel_l1,
                    e.rel_l2,
                    e.rel_linf
                );
            }
            for o in &study.orders {
                println!(
                    "fitted order, species {}: L1 {:.3}, L2 {:.3}, Linf {:.3}",
                    o.species + 1,
                    o.l1,
                    o.l2,
                    o.linf
                );
            }
            Ok(())
        }
        Command::CheckConfig { config } => {
            let config = load_config(&config).map_err(Failure::Config)?;
            let report = runner::check_config(&config).map_err(Failure::Runtime)?;
            print!("{report}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
