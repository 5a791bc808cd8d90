use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qcsm_cli::{check, default_out_dir, run, ReportFormat, RunConfig, OUT_ENV};
use qcsm_core::sim::FaultPolicy;

#[derive(Parser)]
#[command(name = "qcsm", version, about = "Quadrotor attitude sliding-mode simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Abort,
    FlagAndContinue,
}

#[derive(clap::Args)]
struct Common {
    /// Output root directory.
    #[arg(long, env = OUT_ENV)]
    out: Option<PathBuf>,
    /// Keep every k-th trace sample.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    decimate: u64,
    /// Metrics report format.
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
    /// Override the scenario's fault policy.
    #[arg(long, value_enum)]
    fault_policy: Option<Policy>,
    /// Reserved; runs are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario or batch file.
    Run {
        /// Scenario or batch file; with --check, the scenarios directory.
        path: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
        /// Run the acceptance scenarios and compare against expected.toml.
        #[arg(long)]
        check: bool,
    },
    /// Run every entry of a batch file.
    Batch {
        list: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Worker threads; defaults to the batch file's value.
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn config(path: PathBuf, common: Common, workers: Option<usize>) -> RunConfig {
    RunConfig {
        out_dir: common.out.unwrap_or_else(default_out_dir),
        decimate: common.decimate as usize,
        format: common.format,
        fault_policy: common.fault_policy.map(|p| match p {
            Policy::Abort => FaultPolicy::Abort,
            Policy::FlagAndContinue => FaultPolicy::FlagAndContinue,
        }),
        seed: common.seed,
        workers,
        ..RunConfig::new(path, PathBuf::new())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match cli.command {
        Command::Run { path, check: true, .. } => {
            let dir = match &path {
                Some(p) if p.is_file() => p.parent().unwrap_or(Path::new(".")).to_path_buf(),
                Some(p) => p.clone(),
                None => PathBuf::from("scenarios"),
            };
            check(&dir)
        }
        Command::Run { path: None, .. } => {
            eprintln!("error: a scenario file is required unless --check is given");
            qcsm_cli::EXIT_CONFIG
        }
        Command::Run { path: Some(p), common, .. } => run(&config(p, common, None)),
        Command::Batch { list, common, workers } => {
            match qcsm_cli::load_document(&list) {
                Ok(qcsm_cli::Document::Batch(_)) => run(&config(list, common, workers)),
                Ok(qcsm_cli::Document::Scenario(_)) => {
                    eprintln!("error: {} is a single scenario, not a batch", list.display());
                    qcsm_cli::EXIT_CONFIG
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    qcsm_cli::EXIT_CONFIG
                }
            }
        }
    };
    ExitCode::from(status as u8)
}
