use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ncym::{exit, run, validate, ExperimentConfig, NcymError, Report};

#[derive(Parser)]
#[command(name = "ncym", version, about = "Yang-Mills experiments on noncommutative tori and finite spectral triples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config and write its JSON report.
    Run {
        config: PathBuf,
        /// Report path; overrides `output_path` in the config. Without either, the report goes to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Replace every seed in the payload, numbering them from this value.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a config against the schema and print the diagnostics.
    Validate { config: PathBuf },
    /// Print the closed-form torus constants for dimension n.
    Constants {
        #[arg(long)]
        n: u32,
    },
}

fn emit(report: &Report, output: Option<PathBuf>) -> Result<(), NcymError> {
    let text = serde_json::to_string_pretty(report).expect("reports serialize");
    match output {
        Some(path) => {
            std::fs::write(&path, text + "\n").map_err(|source| NcymError::Io { path: path.clone(), source })?;
            log::info!("report written to {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn run_command(config: PathBuf, output: Option<PathBuf>, seed: Option<u64>) -> Result<u8, NcymError> {
    let mut cfg = ExperimentConfig::from_path(&config)?;
    if let Some(seed) = seed {
        cfg = cfg.with_seed(seed);
    }
    let report = run(&cfg)?;
    let output = output.or_else(|| cfg.output_path.as_ref().map(|p| cfg.resolve(p)));
    emit(&report, output)?;
    for (name, ok) in &report.verdicts {
        if !ok {
            log::warn!("verdict {name} failed");
        }
    }
    Ok(if report.passed() { exit::SUCCESS } else { exit::VERDICT_FAILED })
}

fn validate_command(config: PathBuf) -> Result<u8, NcymError> {
    let text = std::fs::read_to_string(&config).map_err(|source| NcymError::Io { path: config.clone(), source })?;
    let diagnostics = validate(&text);
    println!("{}", serde_json::to_string_pretty(&diagnostics).expect("diagnostics serialize"));
    Ok(if diagnostics.is_empty() { exit::SUCCESS } else { exit::INPUT_ERROR })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NCYM_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, output, seed } => run_command(config, output, seed),
        Command::Validate { config } => validate_command(config),
        Command::Constants { n } => run(&ExperimentConfig::constants(n)).and_then(|r| emit(&r, None)).map(|_| exit::SUCCESS),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if let NcymError::ConfigInvalid(diagnostics) = &e {
                for d in diagnostics {
                    eprintln!("  {} {}", if d.path.is_empty() { "/" } else { &d.path }, d.message);
                }
            }
            ExitCode::from(exit::INPUT_ERROR)
        }
    }
}
