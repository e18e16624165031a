use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use lambda_mixer::{parse_config, run, CliError, Command, ErrorRecord, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Spectrum of the single-atom Hamiltonian at the configured fields.
    Eigen,
    /// Propagate the configured initial state and write the trajectory CSV.
    Simulate,
    /// Conversion length and efficiency over an epsilon grid.
    Sweep,
    /// Run the invariant and oracle checks.
    Validate,
}

#[derive(Debug, Parser)]
#[command(name = "lambda-mixer", version, about = "Four-wave mixing in double-lambda and five-level media")]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Flat `key = value` configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file, overriding `output_path` from the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn fail(e: CliError) -> ExitCode {
    let record = ErrorRecord::from(&e);
    eprintln!("{}", serde_json::to_string(&record).unwrap_or_else(|_| record.message.clone()));
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match parse_config(&text) {
                Ok(c) => c,
                Err(e) => return fail(e.into()),
            },
            Err(e) => return fail(CliError::Io(format!("{}: {e}", path.display()))),
        },
        None => RunConfig::default(),
    };
    let cmd = match args.command {
        Cmd::Eigen => Command::Eigen,
        Cmd::Simulate => Command::Simulate,
        Cmd::Sweep => Command::Sweep,
        Cmd::Validate => Command::Validate,
    };
    let progress = |r: &lambda_mixer_core::validation::CheckResult| {
        eprintln!(
            "{} {:<24} measured {:.3e} tolerance {:.3e} ({:.2} s)",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.measured,
            r.tolerance,
            r.runtime_s
        );
    };
    match run(cmd, &cfg, args.out.as_deref(), progress) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => fail(e),
    }
}
