//! Flat `key = value` run configuration.

use std::f64::consts::PI;
use std::fmt;

use lambda_mixer_core::levelsys::Model;
use lambda_mixer_core::propagator::{BackendSpec, Method, PropagationGrid};
use lambda_mixer_core::SystemParams;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub method: Method,
    pub include_phase_terms: bool,
    pub epsilon: f64,
    pub phi0: f64,
    pub omega_over_delta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub zeta_max: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub sample_stride: f64,
    pub eps_min: f64,
    pub eps_max: f64,
    pub points_per_decade: usize,
    pub output_path: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: Model::FourLevel,
            method: Method::ClosedForm,
            include_phase_terms: true,
            epsilon: 1e-2,
            phi0: PI / 4.0,
            omega_over_delta: 0.01,
            gamma1: 0.01,
            gamma2: 0.01,
            zeta_max: 200.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            sample_stride: 0.05,
            eps_min: 1e-6,
            eps_max: 1e-1,
            points_per_decade: 25,
            output_path: None,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> SystemParams {
        SystemParams {
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            omega_over_delta: self.omega_over_delta,
            ..SystemParams::default()
        }
    }

    pub fn backend(&self) -> BackendSpec {
        BackendSpec::new(self.model, self.method, self.include_phase_terms)
    }

    pub fn grid(&self) -> PropagationGrid {
        PropagationGrid {
            zeta_max: self.zeta_max,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            sample_stride: self.sample_stride,
            ..PropagationGrid::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Parse { line: usize, column: usize, message: String },
    Validation { key: String, allowed: String },
    UnknownKey { line: usize, key: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line, column, message } => write!(f, "parse error at line {line}, column {column}: {message}"),
            ConfigError::Validation { key, allowed } => write!(f, "invalid value for `{key}`: allowed {allowed}"),
            ConfigError::UnknownKey { line, key } => write!(f, "unknown key `{key}` at line {line}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    pub fn kind(&self) -> &'static str {
        match self {
            ConfigError::Parse { .. } => "parse_error",
            ConfigError::Validation { .. } => "validation_error",
            ConfigError::UnknownKey { .. } => "unknown_key",
        }
    }
}

fn invalid(key: &str, allowed: &str) -> ConfigError {
    ConfigError::Validation { key: key.to_string(), allowed: allowed.to_string() }
}

fn number(key: &str, raw: &str, allowed: &str) -> Result<f64, ConfigError> {
    raw.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| invalid(key, allowed))
}

/// Parses and validates a configuration; absent keys keep their defaults.
pub fn parse_config(source: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen = std::collections::HashSet::new();
    for (idx, raw_line) in source.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            let column = content.len() - content.trim_start().len() + 1;
            return Err(ConfigError::Parse { line, column, message: "expected `key = value`".into() });
        };
        let key = content[..eq].trim();
        let value = content[eq + 1..].trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            let column = content.len() - content.trim_start().len() + 1;
            return Err(ConfigError::Parse { line, column, message: "malformed key".into() });
        }
        if value.is_empty() {
            return Err(ConfigError::Parse { line, column: eq + 2, message: format!("missing value for `{key}`") });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::Parse { line, column: 1, message: format!("duplicate key `{key}`") });
        }
        set(&mut cfg, line, key, value)?;
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn set(cfg: &mut RunConfig, line: usize, key: &str, value: &str) -> Result<(), ConfigError> {
    const POSITIVE: &str = "a finite number > 0";
    match key {
        "model" => {
            cfg.model = match value {
                "four_level" => Model::FourLevel,
                "five_level" => Model::FiveLevel,
                _ => return Err(invalid(key, "four_level | five_level")),
            }
        }
        "method" => {
            cfg.method = match value {
                "closed_form" => Method::ClosedForm,
                "pert_eigen_gradient" => Method::PertEigenGradient,
                "exact_eigen_gradient" => Method::ExactEigenGradient,
                _ => return Err(invalid(key, "closed_form | pert_eigen_gradient | exact_eigen_gradient")),
            }
        }
        "include_phase_terms" => {
            cfg.include_phase_terms = value.parse().map_err(|_| invalid(key, "true | false"))?;
        }
        "epsilon" => cfg.epsilon = number(key, value, "0 < epsilon <= 1")?,
        "phi0" => cfg.phi0 = number(key, value, "-pi < phi0 <= pi")?,
        "omega_over_delta" => cfg.omega_over_delta = number(key, value, "0 < omega_over_delta < 0.2")?,
        "gamma1" => cfg.gamma1 = number(key, value, "gamma1 >= 0")?,
        "gamma2" => cfg.gamma2 = number(key, value, "gamma2 >= 0")?,
        "zeta_max" => cfg.zeta_max = number(key, value, POSITIVE)?,
        "rel_tol" => cfg.rel_tol = number(key, value, "1e-14 <= rel_tol <= 1e-3")?,
        "abs_tol" => cfg.abs_tol = number(key, value, "abs_tol >= 0")?,
        "sample_stride" => cfg.sample_stride = number(key, value, POSITIVE)?,
        "eps_min" => cfg.eps_min = number(key, value, "0 < eps_min < eps_max")?,
        "eps_max" => cfg.eps_max = number(key, value, "eps_min < eps_max <= 0.1")?,
        "points_per_decade" => {
            cfg.points_per_decade = value.parse().map_err(|_| invalid(key, "an integer in 1..=1000"))?;
        }
        "output_path" => cfg.output_path = Some(value.to_string()),
        _ => return Err(ConfigError::UnknownKey { line, key: key.to_string() }),
    }
    Ok(())
}

fn validate(c: &RunConfig) -> Result<(), ConfigError> {
    let checks: [(&str, bool, &str); 13] = [
        ("epsilon", c.epsilon > 0.0 && c.epsilon <= 1.0, "0 < epsilon <= 1"),
        ("phi0", c.phi0 > -PI && c.phi0 <= PI, "-pi < phi0 <= pi"),
        ("omega_over_delta", c.omega_over_delta > 0.0 && c.omega_over_delta < 0.2, "0 < omega_over_delta < 0.2"),
        ("gamma1", c.gamma1 >= 0.0, "gamma1 >= 0"),
        ("gamma2", c.gamma2 >= 0.0, "gamma2 >= 0"),
        ("zeta_max", c.zeta_max > 0.0, "a finite number > 0"),
        ("rel_tol", (1e-14..=1e-3).contains(&c.rel_tol), "1e-14 <= rel_tol <= 1e-3"),
        ("abs_tol", c.abs_tol >= 0.0, "abs_tol >= 0"),
        ("sample_stride", c.sample_stride > 0.0, "a finite number > 0"),
        ("eps_min", c.eps_min > 0.0, "0 < eps_min < eps_max"),
        ("eps_max", c.eps_max > c.eps_min && c.eps_max <= 0.1, "eps_min < eps_max <= 0.1"),
        ("points_per_decade", (1..=1000).contains(&c.points_per_decade), "an integer in 1..=1000"),
        ("output_path", c.output_path.as_ref().is_none_or(|p| !p.is_empty()), "a non-empty path"),
    ];
    match checks.iter().find(|(_, ok, _)| !ok) {
        Some((key, _, allowed)) => Err(invalid(key, allowed)),
        None => Ok(()),
    }
}
