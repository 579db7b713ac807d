use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use online_adp_cli::config::ExperimentConfig;
use online_adp_cli::report::{emit_report, read_trajectory_csv};
use online_adp_cli::UsageError;

/// Experiment harness for online abstract dynamic programming: runs an
/// algorithm against a time-varying scenario, checks every applicable
/// tracking-error bound, and writes plot-ready trajectories.
#[derive(Parser)]
#[command(name = "online-adp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write trajectory.csv + manifest.json.
    /// Exit status 0 iff every bound check passes.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Combine trajectory CSVs into a long-format plotdata.csv.
    Report {
        #[arg(long)]
        out: PathBuf,
        /// Trajectory CSV files (each next to its manifest.json).
        #[arg(required = true)]
        trajectories: Vec<PathBuf>,
    },
    /// Validate a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_BOUND_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("ONLINE_ADP_LOG")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let text = err.to_string();
            if err.downcast_ref::<UsageError>().is_some() || text.starts_with("usage error") {
                let body = text.strip_prefix("usage error: ").unwrap_or(&text);
                eprintln!("usage error: {body}");
                ExitCode::from(EXIT_USAGE)
            } else {
                eprintln!("error: {err}");
                ExitCode::from(EXIT_RUNTIME)
            }
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Run { config, out, seed } => {
            let (parsed, raw) = ExperimentConfig::from_file(&config)?;
            let base_dir = config.parent().unwrap_or_else(|| std::path::Path::new("."));
            let outcome = online_adp_cli::run_experiment(&parsed, &raw, base_dir, &out, seed)?;
            for check in &outcome.manifest.checks {
                println!(
                    "{} {} margin={:+.6e} ({})",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.margin,
                    check.detail
                );
            }
            log::info!(
                "wrote {} and {}",
                out.join("trajectory.csv").display(),
                out.join("manifest.json").display()
            );
            Ok(if outcome.manifest.all_pass {
                EXIT_OK
            } else {
                EXIT_BOUND_VIOLATION
            })
        }
        Command::Report { out, trajectories } => {
            let series = trajectories
                .iter()
                .map(|p| read_trajectory_csv(p))
                .collect::<anyhow::Result<Vec<_>>>()?;
            std::fs::create_dir_all(&out)?;
            emit_report(&series, &out.join("plotdata.csv"))?;
            println!("wrote {}", out.join("plotdata.csv").display());
            Ok(EXIT_OK)
        }
        Command::Validate { config } => {
            let (parsed, _) = ExperimentConfig::from_file(&config)?;
            let base_dir = config.parent().unwrap_or_else(|| std::path::Path::new("."));
            let summary = online_adp_cli::experiment::validate_config(&parsed, base_dir)?;
            println!("{summary}");
            Ok(EXIT_OK)
        }
    }
}
