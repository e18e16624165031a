//! Conversion length and efficiency measured from a trajectory.
//!
//! The conversion length is the ζ of the first local maximum of |E₁|²,
//! refined by a parabola through the three samples around it. The efficiency
//! is (max|E₁|² − min|E₁|²)/max|Ω₁|² over the first cycle, which runs from the
//! start to the first local minimum after that maximum (or to the end of the
//! trajectory if the minimum has not been reached).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagator::{Trajectory, TrajectorySample};

/// A local maximum must rise this far (relative to c1) above the running
/// minimum; rejects rounding-level wiggles on stationary trajectories.
const PROMINENCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricSource {
    Measured,
    AnalyticWithPhase,
    AnalyticNoPhase,
}

/// Caveats attached to an analytic prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Validity {
    /// ε above the leading-order regime (ε > 0.01).
    pub extrapolated: bool,
    /// The efficiency formula left [0, 1] and was clamped.
    pub clamped: bool,
}

impl Validity {
    pub fn label(&self) -> &'static str {
        match (self.extrapolated, self.clamped) {
            (false, false) => "ok",
            (true, false) => "extrapolated",
            (false, true) => "clamped",
            (true, true) => "extrapolated+clamped",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionMetrics {
    /// Conversion length L in units of Δ/κ.
    pub length: f64,
    pub efficiency: f64,
    pub source: MetricSource,
    pub validity: Validity,
}

fn e1_intensity(s: &TrajectorySample) -> f64 {
    s.state.e1.norm_sqr()
}

/// Index of the first prominent local maximum of |E₁|².
fn first_maximum(samples: &[TrajectorySample]) -> Option<usize> {
    let c1 = samples.first()?.invariants.c1;
    let threshold = PROMINENCE * c1.max(f64::MIN_POSITIVE);
    let mut running_min = f64::INFINITY;
    for i in 1..samples.len().saturating_sub(1) {
        let (prev, cur, next) = (e1_intensity(&samples[i - 1]), e1_intensity(&samples[i]), e1_intensity(&samples[i + 1]));
        running_min = running_min.min(prev);
        if cur > prev && cur >= next && cur - running_min > threshold {
            return Some(i);
        }
    }
    None
}

fn first_minimum_after(samples: &[TrajectorySample], start: usize) -> Option<usize> {
    (start + 1..samples.len().saturating_sub(1)).find(|&j| {
        let (prev, cur, next) = (e1_intensity(&samples[j - 1]), e1_intensity(&samples[j]), e1_intensity(&samples[j + 1]));
        cur < prev && cur <= next
    })
}

/// Vertex abscissa of the parabola through three points.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> f64 {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curvature = (d2 - d1) / (x[2] - x[0]);
    if curvature >= 0.0 || !curvature.is_finite() {
        return x[1];
    }
    // p(x) = y0 + d1 (x − x0) + curvature (x − x0)(x − x1)
    let vertex = 0.5 * (x[0] + x[1]) - d1 / (2.0 * curvature);
    vertex.clamp(x[0], x[2])
}

pub fn detect_conversion(traj: &Trajectory) -> Result<ConversionMetrics> {
    let samples = &traj.samples;
    let peak = first_maximum(samples).ok_or(Error::NoCycleFound)?;
    let xs = [samples[peak - 1].zeta, samples[peak].zeta, samples[peak + 1].zeta];
    let ys = [e1_intensity(&samples[peak - 1]), e1_intensity(&samples[peak]), e1_intensity(&samples[peak + 1])];
    let length = parabola_vertex(xs, ys);

    let end = first_minimum_after(samples, peak).unwrap_or(samples.len() - 1);
    let window = &samples[..=end];
    let (mut e_max, mut e_min, mut pump_max) = (f64::NEG_INFINITY, f64::INFINITY, 0.0f64);
    for s in window {
        let e = e1_intensity(s);
        e_max = e_max.max(e);
        e_min = e_min.min(e);
        pump_max = pump_max.max(s.state.omega1.norm_sqr());
    }
    Ok(ConversionMetrics {
        length,
        efficiency: (e_max - e_min) / pump_max,
        source: MetricSource::Measured,
        validity: Validity::default(),
    })
}

/// Incremental detector for a completed first cycle, for use as the stop
/// condition of [`crate::propagator::integrate_until`].
#[derive(Debug, Clone, Default)]
pub struct CycleWatch {
    scanned: usize,
    running_min: f64,
    peak: Option<usize>,
}

impl CycleWatch {
    pub fn new() -> Self {
        Self { scanned: 1, running_min: f64::INFINITY, peak: None }
    }

    /// True once a prominent maximum of |E₁|² and the following minimum have
    /// both been seen.
    pub fn observe(&mut self, samples: &[TrajectorySample]) -> bool {
        let Some(first) = samples.first() else { return false };
        let threshold = PROMINENCE * first.invariants.c1.max(f64::MIN_POSITIVE);
        while self.scanned + 1 < samples.len() {
            let i = self.scanned;
            let (prev, cur, next) = (e1_intensity(&samples[i - 1]), e1_intensity(&samples[i]), e1_intensity(&samples[i + 1]));
            match self.peak {
                None => {
                    self.running_min = self.running_min.min(prev);
                    if cur > prev && cur >= next && cur - self.running_min > threshold {
                        self.peak = Some(i);
                    }
                }
                Some(_) => {
                    if cur < prev && cur <= next {
                        return true;
                    }
                }
            }
            self.scanned += 1;
        }
        false
    }

    pub fn peak_found(&self) -> bool {
        self.peak.is_some()
    }
}
