//! Conversion length and efficiency as functions of the seed ratio ε.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::conversion::{detect_conversion, ConversionMetrics, CycleWatch};
use super::predict::{predict_no_phase, predict_with_phase, SeedSpec};
use crate::error::{Error, Result};
use crate::fields::{FieldState, SystemParams};
use crate::levelsys::Model;
use crate::propagator::{integrate_until, BackendSpec, PropagationGrid};

/// The integration window is enlarged by this factor until a cycle fits.
const WINDOW_GROWTH: f64 = 4.0;
const MAX_WINDOW_GROWTHS: u32 = 5;

/// `points_per_decade` log-spaced points per decade from `eps_min` to
/// `eps_max` inclusive.
pub fn log_grid(eps_min: f64, eps_max: f64, points_per_decade: usize) -> Result<Vec<f64>> {
    if !(eps_min > 0.0 && eps_max > eps_min && eps_max.is_finite()) || points_per_decade == 0 {
        return Err(Error::InvalidInput(format!(
            "bad epsilon grid [{eps_min}, {eps_max}] at {points_per_decade} points per decade"
        )));
    }
    let (lo, hi) = (eps_min.log10(), eps_max.log10());
    let decades = hi - lo;
    let intervals = (decades * points_per_decade as f64).round().max(1.0) as usize;
    Ok((0..=intervals)
        .map(|k| {
            if k == 0 {
                eps_min
            } else if k == intervals {
                eps_max
            } else {
                10f64.powf(lo + decades * k as f64 / intervals as f64)
            }
        })
        .collect())
}

/// Integrates the symmetric seeded state until the first conversion cycle
/// has completed, enlarging the window when needed, and measures it.
pub fn measure_conversion(
    epsilon: f64,
    phi0: f64,
    spec: &BackendSpec,
    params: &SystemParams,
    grid: &PropagationGrid,
) -> Result<ConversionMetrics> {
    let initial = FieldState::seeded(epsilon, phi0);
    let mut window = *grid;
    for attempt in 0..=MAX_WINDOW_GROWTHS {
        let mut watch = CycleWatch::new();
        let mut complete = false;
        let traj = integrate_until(&initial, params, spec, &window, |s| {
            complete = watch.observe(s);
            complete
        })?;
        if complete || attempt == MAX_WINDOW_GROWTHS {
            return detect_conversion(&traj);
        }
        window.zeta_max = window.zeta_start + WINDOW_GROWTH * (window.zeta_max - window.zeta_start);
    }
    unreachable!()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub model: Model,
    pub phase_terms: bool,
    pub l_measured: f64,
    pub e_measured: f64,
    pub l_analytic: f64,
    pub e_analytic: f64,
    pub validity_flag: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Rows for one (model, phase_terms) series, in ε order.
    pub fn series(&self, model: Model, phase_terms: bool) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.model == model && r.phase_terms == phase_terms)
    }
}

fn analytic(epsilon: f64, phi0: f64, phase_terms: bool) -> std::result::Result<ConversionMetrics, Error> {
    let seed = SeedSpec::new(epsilon, phi0)?;
    if phase_terms {
        predict_with_phase(&seed)
    } else {
        predict_no_phase(&seed)
    }
}

fn sweep_row(epsilon: f64, phi0: f64, spec: &BackendSpec, params: &SystemParams, grid: &PropagationGrid) -> Result<SweepRow> {
    let phase_terms = spec.phase_terms_active();
    let mut flags = Vec::new();
    let (l_measured, e_measured) = match measure_conversion(epsilon, phi0, spec, params, grid) {
        Ok(m) => (m.length, m.efficiency),
        Err(Error::NoCycleFound) => {
            flags.push("no_cycle".to_string());
            (f64::NAN, f64::NAN)
        }
        Err(e) => return Err(e),
    };
    let (l_analytic, e_analytic) = match analytic(epsilon, phi0, phase_terms) {
        Ok(m) => {
            if m.validity.extrapolated || m.validity.clamped {
                flags.push(m.validity.label().to_string());
            }
            (m.length, m.efficiency)
        }
        Err(e) => {
            flags.push(format!("analytic_{}", e.kind()));
            (f64::NAN, f64::NAN)
        }
    };
    let validity_flag = if flags.is_empty() { "ok".to_string() } else { flags.join("+") };
    Ok(SweepRow { epsilon, model: spec.model, phase_terms, l_measured, e_measured, l_analytic, e_analytic, validity_flag })
}

/// One row per (ε, spec), ordered by ε and then by the order of `specs`.
/// Rows run on the current rayon pool. A missing cycle is recorded in the
/// row; any other failure aborts the sweep.
pub fn sweep_epsilon(
    eps_grid: &[f64],
    phi0: f64,
    specs: &[BackendSpec],
    params: &SystemParams,
    grid: &PropagationGrid,
) -> Result<SweepTable> {
    if eps_grid.iter().any(|e| !(*e > 0.0 && e.is_finite())) || eps_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("epsilon grid must be positive and strictly increasing".into()));
    }
    params.validate()?;
    grid.validate()?;
    let jobs: Vec<(f64, BackendSpec)> = eps_grid.iter().flat_map(|&e| specs.iter().map(move |s| (e, *s))).collect();
    let rows = jobs
        .par_iter()
        .map(|(e, s)| sweep_row(*e, phi0, s, params, grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows })
}

/// Least-squares line y = slope·x + intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidInput("line fit needs two or more paired points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("line fit with constant abscissa".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LineFit { slope, intercept: my - slope * mx, r_squared })
}

/// Fit of ln y against ln x.
pub fn fit_log_log(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn log_grid_counts_and_endpoints() {
        let g = log_grid(1e-4, 1e-2, 25).unwrap();
        assert_eq!(g.len(), 51);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[50], 1e-2);
        assert!((g[25] - 1e-3).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(log_grid(1e-6, 1e-1, 25).unwrap().len(), 126);
        assert!(log_grid(1e-2, 1e-4, 25).is_err());
        assert!(log_grid(0.0, 1e-4, 25).is_err());
    }

    #[test]
    fn fits_recover_exact_lines() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14 && (f.intercept - 3.0).abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
        let e = [1e-6, 1e-4, 1e-2];
        let l: Vec<f64> = e.iter().map(|v: &f64| 7.0 * v.powf(-0.5)).collect();
        assert!((fit_log_log(&e, &l).unwrap().slope + 0.5).abs() < 1e-12);
    }

    #[test]
    fn rows_are_ordered_by_epsilon_then_spec() {
        let specs = [BackendSpec::four_level(true), BackendSpec::four_level(false)];
        let grid = PropagationGrid { zeta_max: 50.0, rel_tol: 1e-8, ..PropagationGrid::default() };
        let t = sweep_epsilon(&[1e-2, 5e-2], PI / 4.0, &specs, &SystemParams::default(), &grid).unwrap();
        let keys: Vec<(f64, bool)> = t.rows.iter().map(|r| (r.epsilon, r.phase_terms)).collect();
        assert_eq!(keys, vec![(1e-2, true), (1e-2, false), (5e-2, true), (5e-2, false)]);
        assert_eq!(t.rows[2].validity_flag, "extrapolated");
        assert_eq!(t.rows[0].validity_flag, "ok");
        assert!(t.rows.iter().all(|r| r.l_measured > 0.0));
    }

    #[test]
    fn unsorted_grid_is_rejected() {
        let r = sweep_epsilon(&[1e-2, 1e-3], 0.5, &[BackendSpec::four_level(true)], &SystemParams::default(), &PropagationGrid::default());
        assert!(r.is_err());
    }
}
