//! Leading-order analytic conversion length and efficiency.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::conversion::{ConversionMetrics, MetricSource, Validity};
use crate::error::{Error, Result};

/// Largest ε accepted by the predictors.
pub const MAX_EPSILON: f64 = 0.1;
/// Above this ε predictions are flagged as extrapolated.
pub const EXTRAPOLATION_EPSILON: f64 = 0.01;
const SINGULAR_GAP: f64 = 1e-9;

/// Seed intensity ratio ε = |E(0)|²/|Ω(0)|² and initial relative phase φ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub epsilon: f64,
    pub phi0: f64,
}

fn phase_in_range(phi0: f64) -> bool {
    phi0 > -PI && phi0 <= PI
}

impl SeedSpec {
    pub fn new(epsilon: f64, phi0: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
        }
        if !phase_in_range(phi0) {
            return Err(Error::InvalidInput(format!("phi0 must lie in (-pi, pi], got {phi0}")));
        }
        Ok(Self { epsilon, phi0 })
    }

    /// The vanishing-seed limit ε → 0 at fixed φ₀.
    pub fn small_seed_limit(phi0: f64) -> Result<Self> {
        if !phase_in_range(phi0) {
            return Err(Error::InvalidInput(format!("phi0 must lie in (-pi, pi], got {phi0}")));
        }
        Ok(Self { epsilon: 0.0, phi0 })
    }

    fn check_epsilon(&self) -> Result<()> {
        if self.epsilon > MAX_EPSILON {
            return Err(Error::OutOfValidityRegion(format!(
                "epsilon = {} exceeds {MAX_EPSILON}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// cos φ₀, with the rounding residue at φ₀ = ±π/2 removed.
fn cos_phi0(phi0: f64) -> f64 {
    let c = phi0.cos();
    if c.abs() < 4.0 * f64::EPSILON {
        0.0
    } else {
        c
    }
}

fn clamp_unit(e: f64) -> (f64, bool) {
    if e < 0.0 {
        (0.0, true)
    } else if e > 1.0 {
        (1.0, true)
    } else {
        (e, false)
    }
}

/// With the ac-Stark phase terms:
/// e = [(1−c) − ε(1 − 3c − 2c²)]/(1+c), L = 2π/(√ε (1+c)), c = cos φ₀.
pub fn predict_with_phase(seed: &SeedSpec) -> Result<ConversionMetrics> {
    seed.check_epsilon()?;
    let c = cos_phi0(seed.phi0);
    if 1.0 + c <= SINGULAR_GAP {
        return Err(Error::PhaseSingularity(1.0 + c));
    }
    let eps = seed.epsilon;
    let raw = ((1.0 - c) - eps * (1.0 - 3.0 * c - 2.0 * c * c)) / (1.0 + c);
    let (efficiency, clamped) = clamp_unit(raw);
    let length = if eps == 0.0 { f64::INFINITY } else { 2.0 * PI / (eps.sqrt() * (1.0 + c)) };
    Ok(ConversionMetrics {
        length,
        efficiency,
        source: MetricSource::AnalyticWithPhase,
        validity: Validity { extrapolated: eps > EXTRAPOLATION_EPSILON, clamped },
    })
}

/// Without the phase terms: e = 1 − ε√c, L = 2 ln(4/(ε² c)), valid for c > 0.
pub fn predict_no_phase(seed: &SeedSpec) -> Result<ConversionMetrics> {
    seed.check_epsilon()?;
    let c = cos_phi0(seed.phi0);
    if c <= 0.0 {
        return Err(Error::OutOfValidityRegion(format!("cos(phi0) = {c} is not positive")));
    }
    let eps = seed.epsilon;
    let (efficiency, clamped) = clamp_unit(1.0 - eps * c.sqrt());
    let length = if eps == 0.0 { f64::INFINITY } else { 2.0 * (4.0 / (eps * eps * c)).ln() };
    Ok(ConversionMetrics {
        length,
        efficiency,
        source: MetricSource::AnalyticNoPhase,
        validity: Validity { extrapolated: eps > EXTRAPOLATION_EPSILON, clamped },
    })
}
