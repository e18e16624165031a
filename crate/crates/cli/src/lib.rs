//! Command implementations behind the `lambda-mixer` executable.

pub mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use lambda_mixer_core::analysis::{log_grid, sweep_epsilon};
use lambda_mixer_core::levelsys::{build_hamiltonian, eig_exact};
use lambda_mixer_core::propagator::{integrate, BackendSpec};
use lambda_mixer_core::validation::{run_all, CheckResult, ValidationReport};
use lambda_mixer_core::{io, Error, FieldState};
use serde::Serialize;

pub use config::{parse_config, ConfigError, RunConfig};

/// Environment variable capping the sweep worker count.
pub const THREADS_ENV: &str = "LAMBDA_MIXER_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eigen,
    Simulate,
    Sweep,
    Validate,
}

impl Command {
    pub fn default_output(self) -> &'static str {
        match self {
            Command::Eigen => "spectrum.json",
            Command::Simulate => "trajectory.csv",
            Command::Sweep => "sweep.csv",
            Command::Validate => "validation_report.json",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Numerical(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(e) => e.kind(),
            CliError::Numerical(e) => e.kind(),
            CliError::Io(_) => "io",
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Config(e) => e.to_string(),
            CliError::Numerical(e) => e.to_string(),
            CliError::Io(m) => m.clone(),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(m) => CliError::Io(m),
            other => CliError::Numerical(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Machine-readable failure written to stderr.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: String,
    pub message: String,
    pub exit_code: i32,
}

impl From<&CliError> for ErrorRecord {
    fn from(e: &CliError) -> Self {
        Self { error: e.kind().to_string(), message: e.message(), exit_code: e.exit_code() }
    }
}

/// What a successful command produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub output: PathBuf,
    /// Set by `validate` only.
    pub report: Option<ValidationReport>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match &self.report {
            Some(r) if !r.passed => 4,
            _ => 0,
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(e.to_string()))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Worker pool sized by [`THREADS_ENV`], or rayon's default when unset.
fn worker_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Config(ConfigError::Validation { key: THREADS_ENV.into(), allowed: "a positive integer".into() }))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Io(e.to_string()))
}

#[derive(Serialize)]
struct SpectrumEntry {
    value_re: f64,
    value_im: f64,
    vector: Vec<[f64; 2]>,
    residual: f64,
}

#[derive(Serialize)]
struct Spectrum {
    model: &'static str,
    epsilon: f64,
    phi0: f64,
    omega_over_delta: f64,
    eigenpairs: Vec<SpectrumEntry>,
}

fn run_eigen(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let params = cfg.params();
    params.validate()?;
    let fields = FieldState::seeded(cfg.epsilon, cfg.phi0).scaled(params.omega0());
    let pairs = eig_exact(&build_hamiltonian(cfg.model, &fields, &params))?;
    let spectrum = Spectrum {
        model: cfg.model.label(),
        epsilon: cfg.epsilon,
        phi0: cfg.phi0,
        omega_over_delta: cfg.omega_over_delta,
        eigenpairs: pairs
            .into_iter()
            .map(|p| SpectrumEntry {
                value_re: p.value.re,
                value_im: p.value.im,
                vector: p.vector.iter().map(|z| [z.re, z.im]).collect(),
                residual: p.residual,
            })
            .collect(),
    };
    write_json(out, &spectrum)
}

fn run_simulate(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let initial = FieldState::seeded(cfg.epsilon, cfg.phi0);
    let traj = integrate(&initial, &cfg.params(), &cfg.backend(), &cfg.grid())?;
    let mut w = create(out)?;
    io::write_trajectory_csv(&traj, &mut w)?;
    w.flush()?;
    Ok(())
}

fn run_sweep(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let eps = log_grid(cfg.eps_min, cfg.eps_max, cfg.points_per_decade)?;
    let specs = [BackendSpec::new(cfg.model, cfg.method, true), BackendSpec::new(cfg.model, cfg.method, false)];
    let (params, grid) = (cfg.params(), cfg.grid());
    let table = worker_pool()?.install(|| sweep_epsilon(&eps, cfg.phi0, &specs, &params, &grid))?;
    let mut w = create(out)?;
    io::write_sweep_csv(&table, &mut w)?;
    w.flush()?;
    Ok(())
}

fn run_validate(out: &Path, progress: impl FnMut(&CheckResult) + Send) -> Result<ValidationReport, CliError> {
    let report = worker_pool()?.install(|| run_all(progress));
    write_json(out, &report)?;
    Ok(report)
}

/// Runs one command. `out` overrides the configured output path.
pub fn run(cmd: Command, cfg: &RunConfig, out: Option<&Path>, progress: impl FnMut(&CheckResult) + Send) -> Result<RunOutcome, CliError> {
    let output = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_path.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(cmd.default_output()));
    let report = match cmd {
        Command::Eigen => run_eigen(cfg, &output).map(|_| None)?,
        Command::Simulate => run_simulate(cfg, &output).map(|_| None)?,
        Command::Sweep => run_sweep(cfg, &output).map(|_| None)?,
        Command::Validate => Some(run_validate(&output, progress)?),
    };
    Ok(RunOutcome { output, report })
}
