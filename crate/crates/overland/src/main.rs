use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use overland::runner::{run, RunOptions};
use overland::verify::{convergence_suite, lake_suite, ritter_suite, SuiteReport};

/// Shallow water solver for overland flow: batch runs and built-in
/// verification against analytic solutions.
#[derive(Parser)]
#[command(name = "overland", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config key, e.g. --set Ks=2.2e-6 (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Write outputs here instead of the configured output_dir.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Worker threads (outputs are bitwise identical at any count).
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Suppress progress logging.
        #[arg(long)]
        quiet: bool,
    },
    /// Run a verification suite against its analytic oracle.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Parse and validate a config file without running it.
    CheckConfig {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Suite {
    Lake,
    Ritter,
    Convergence,
    All,
}

fn parse_overrides(set: &[String]) -> Result<Vec<(String, String)>, String> {
    set.iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| format!("--set expects KEY=VALUE, got '{kv}'"))
        })
        .collect()
}

fn exit_code_for(err: &overland::Error) -> u8 {
    if err.is_input_error() {
        2
    } else {
        3
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, set, output_dir, threads, quiet } => {
            let overrides = match parse_overrides(&set) {
                Ok(o) => o,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(2);
                }
            };
            let cfg = match overland::parse_config_with_overrides(&config, &overrides) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions { quiet, threads, output_dir };
            let hash = cfg.hash();
            match run(&cfg, &opts) {
                Ok(summary) => {
                    if !quiet {
                        eprintln!(
                            "done [config {hash}]: {} steps to t = {} s in {:.2} s wall, \
                             h in [{:.3e}, {:.3e}], mass residual {:+.3e} m^3",
                            summary.steps,
                            summary.final_time,
                            summary.wall_seconds,
                            summary.min_h,
                            summary.max_h,
                            summary.residual,
                        );
                        for path in &summary.outputs {
                            eprintln!("wrote {}", path.display());
                        }
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code_for(&e))
                }
            }
        }
        Command::Verify { suite } => {
            let reports: Vec<SuiteReport> = match suite {
                Suite::Lake => vec![lake_suite()],
                Suite::Ritter => vec![ritter_suite()],
                Suite::Convergence => vec![convergence_suite()],
                Suite::All => vec![lake_suite(), ritter_suite(), convergence_suite()],
            };
            let mut all_pass = true;
            for report in &reports {
                print!("{}", report.render());
                all_pass &= report.passed();
            }
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::CheckConfig { config, set } => {
            let overrides = match parse_overrides(&set) {
                Ok(o) => o,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(2);
                }
            };
            match overland::parse_config_with_overrides(&config, &overrides) {
                Ok(cfg) => {
                    println!("ok: config hash {}", cfg.hash());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
