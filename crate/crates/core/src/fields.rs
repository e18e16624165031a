//! Field amplitudes and medium parameters shared by every module.
//!
//! Amplitudes are complex Rabi frequencies in units of the reference pump
//! amplitude Ω₀ = |Ω₁(0)|. Frequencies are in units of the detuning Δ and
//! propagation lengths in units of Δ/κ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this value the pump-pair norm |Ω₁|² + |E₁|² counts as zero.
pub const DEGENERATE_NORM: f64 = 1e-300;

/// Selects one of the four fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldSelector {
    Omega1,
    Omega2,
    E1,
    E2,
}

impl FieldSelector {
    pub const ALL: [FieldSelector; 4] = [
        FieldSelector::Omega1,
        FieldSelector::Omega2,
        FieldSelector::E1,
        FieldSelector::E2,
    ];

    pub fn index(self) -> usize {
        match self {
            FieldSelector::Omega1 => 0,
            FieldSelector::Omega2 => 1,
            FieldSelector::E1 => 2,
            FieldSelector::E2 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldSelector::Omega1 => "omega1",
            FieldSelector::Omega2 => "omega2",
            FieldSelector::E1 => "e1",
            FieldSelector::E2 => "e2",
        }
    }
}

/// The four complex Rabi amplitudes at one propagation point.
///
/// Ω₁ and Ω₂ are the pumps, E₁ and E₂ the generated fields. Ω₁ and E₁ drive
/// the resonant transitions, Ω₂ and E₂ the detuned ones.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldState {
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub e1: Complex64,
    pub e2: Complex64,
}

impl FieldState {
    pub fn new(omega1: Complex64, omega2: Complex64, e1: Complex64, e2: Complex64) -> Self {
        Self { omega1, omega2, e1, e2 }
    }

    /// All four amplitudes real.
    pub fn real(omega1: f64, omega2: f64, e1: f64, e2: f64) -> Self {
        Self::new(omega1.into(), omega2.into(), e1.into(), e2.into())
    }

    /// Symmetric seeded state: Ω₁ = Ω₂ = 1 and E₁ = E₂ = √ε·e^(−iφ₀/2), so the
    /// relative phase starts at φ₀ and the seed ratio |E|²/|Ω|² at ε.
    pub fn seeded(epsilon: f64, phi0: f64) -> Self {
        let seed = Complex64::from_polar(epsilon.sqrt(), -0.5 * phi0);
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), seed, seed)
    }

    pub fn from_array(a: [Complex64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [Complex64; 4] {
        [self.omega1, self.omega2, self.e1, self.e2]
    }

    pub fn get(&self, which: FieldSelector) -> Complex64 {
        self.to_array()[which.index()]
    }

    pub fn with(self, which: FieldSelector, value: Complex64) -> Self {
        let mut a = self.to_array();
        a[which.index()] = value;
        Self::from_array(a)
    }

    pub fn scaled(self, s: f64) -> Self {
        Self::from_array(self.to_array().map(|z| z * s))
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// |Ω₁|² + |E₁|², the common denominator of the field equations.
    pub fn pump_pair_norm(&self) -> f64 {
        self.omega1.norm_sqr() + self.e1.norm_sqr()
    }

    /// Intensities in (Ω₁, Ω₂, E₁, E₂) order.
    pub fn intensities(&self) -> [f64; 4] {
        self.to_array().map(|z| z.norm_sqr())
    }

    /// The four-wave product Ω₁Ω₂E₁*E₂*.
    pub fn mixing_product(&self) -> Complex64 {
        self.omega1 * self.omega2 * self.e1.conj() * self.e2.conj()
    }

    /// Errors unless all entries are finite and the pump-pair norm is nonzero.
    pub fn check_propagatable(&self) -> Result<f64> {
        if !self.is_finite() {
            return Err(Error::InvalidInput("field state has non-finite entries".into()));
        }
        let norm = self.pump_pair_norm();
        if norm < DEGENERATE_NORM {
            return Err(Error::DegenerateDenominator(norm));
        }
        Ok(norm)
    }
}

/// Medium parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Detuning Δ of the Ω₂/E₂ transitions.
    pub delta: f64,
    /// Decay of the resonant excited state.
    pub gamma1: f64,
    /// Decay of the detuned excited state.
    pub gamma2: f64,
    /// Propagation coupling κ.
    pub kappa: f64,
    /// Pump scale Ω₀/Δ used by the exact eigenvalue backend.
    pub omega_over_delta: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self { delta: 1.0, gamma1: 0.01, gamma2: 0.01, kappa: 1.0, omega_over_delta: 0.01 }
    }
}

impl SystemParams {
    pub fn lossless() -> Self {
        Self { gamma1: 0.0, gamma2: 0.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.delta > 0.0
            && self.gamma1 >= 0.0
            && self.gamma2 >= 0.0
            && self.kappa > 0.0
            && self.omega_over_delta > 0.0
            && self.omega_over_delta < 0.2
            && [self.delta, self.gamma1, self.gamma2, self.kappa].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "system parameters out of range: {self:?} \
                 (need delta > 0, gamma >= 0, kappa > 0, 0 < omega_over_delta < 0.2)"
            )))
        }
    }

    /// Absolute pump amplitude Ω₀ = (Ω₀/Δ)·Δ.
    pub fn omega0(&self) -> f64 {
        self.omega_over_delta * self.delta
    }
}
