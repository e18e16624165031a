use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::FieldState;

/// Amplitudes below this modulus have no defined phase.
pub const PHASE_THRESHOLD: f64 = 1e-15;

/// Constants of motion of the field equations.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InvariantValues {
    /// |Ω₁|² + |E₁|²
    pub c1: f64,
    /// |Ω₂|² + |E₂|²
    pub c2: f64,
    /// |Ω₁|² − |Ω₂|²
    pub c3: f64,
    /// Re(Ω₁Ω₂E₁*E₂*), conserved only without the phase terms.
    pub c4: f64,
}

impl InvariantValues {
    /// Total field intensity c1 + c2.
    pub fn total(&self) -> f64 {
        self.c1 + self.c2
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.c1, self.c2, self.c3, self.c4]
    }
}

pub fn invariants_of(state: &FieldState) -> InvariantValues {
    let [o1, o2, e1, e2] = state.intensities();
    InvariantValues { c1: o1 + e1, c2: o2 + e2, c3: o1 - o2, c4: state.mixing_product().re }
}

/// φ = φ_Ω1 + φ_Ω2 − φ_E1 − φ_E2, wrapped to (−π, π].
pub fn relative_phase(state: &FieldState) -> Result<f64> {
    let smallest = state.to_array().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if !(smallest >= PHASE_THRESHOLD) {
        return Err(Error::UndefinedPhase(smallest));
    }
    // Phase of the product of unit phasors; avoids underflow of the raw product.
    let unit = |z: num_complex::Complex64| z / z.norm();
    let p = unit(state.omega1) * unit(state.omega2) * unit(state.e1).conj() * unit(state.e2).conj();
    let phi = p.im.atan2(p.re);
    Ok(if phi <= -PI { phi + 2.0 * PI } else { phi })
}
