//! Right-hand sides of the field equations of motion.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldState, SystemParams};
use crate::levelsys::{self, BranchReference, Model};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// dF/dζ for the four fields, in units of κΩ₀/Δ.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldDerivatives {
    pub d_omega1: Complex64,
    pub d_omega2: Complex64,
    pub d_e1: Complex64,
    pub d_e2: Complex64,
}

impl FieldDerivatives {
    pub fn from_array(a: [Complex64; 4]) -> Self {
        Self { d_omega1: a[0], d_omega2: a[1], d_e1: a[2], d_e2: a[3] }
    }

    pub fn to_array(self) -> [Complex64; 4] {
        [self.d_omega1, self.d_omega2, self.d_e1, self.d_e2]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Hand-expanded field equations.
    ClosedForm,
    /// −i ∂λ₀/∂F* with λ₀ the second-order eigenvalue.
    PertEigenGradient,
    /// −i ∂λ/∂F* with λ the tracked exact eigenvalue.
    ExactEigenGradient,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::PertEigenGradient => "pert_eigen_gradient",
            Method::ExactEigenGradient => "exact_eigen_gradient",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BackendSpec {
    pub model: Model,
    pub method: Method,
    /// Only meaningful for the four-level model with the closed-form or
    /// perturbative backends.
    pub include_phase_terms: bool,
}

impl BackendSpec {
    pub fn new(model: Model, method: Method, include_phase_terms: bool) -> Self {
        Self { model, method, include_phase_terms }
    }

    pub fn four_level(include_phase_terms: bool) -> Self {
        Self::new(Model::FourLevel, Method::ClosedForm, include_phase_terms)
    }

    /// Whether the ac-Stark phase terms are active for this backend.
    pub fn phase_terms_active(&self) -> bool {
        match (self.model, self.method) {
            (Model::FiveLevel, _) => false,
            (Model::FourLevel, Method::ExactEigenGradient) => true,
            (Model::FourLevel, _) => self.include_phase_terms,
        }
    }

    pub fn label(&self) -> String {
        format!("{}/{}/{}", self.model.label(), self.method.label(), if self.phase_terms_active() { "phase" } else { "no_phase" })
    }
}

/// The field equations with the ac-Stark phase terms optionally dropped:
///
/// ```text
/// dE₁/dζ = −iκ (Ω₁*Ω₁²Ω₂E₂* − E₁²E₂Ω₁*Ω₂*) / (Δ S²)  − iκ |Ω₁|²(|Ω₂|² − |E₂|²) E₁ / (Δ S²)
/// dE₂/dζ = −iκ Ω₁Ω₂E₁* / (Δ S)                       + iκ |E₁|² E₂ / (Δ S)
/// dΩ₁/dζ =  iκ (Ω₁²Ω₂E₁*E₂* − |E₁|²E₁E₂Ω₂*) / (Δ S²) + iκ |E₁|²(|Ω₂|² − |E₂|²) Ω₁ / (Δ S²)
/// dΩ₂/dζ = −iκ E₁E₂Ω₁* / (Δ S)                       + iκ |Ω₁|² Ω₂ / (Δ S)
/// ```
///
/// with S = |Ω₁|² + |E₁|². The right-hand column is the phase part. Every
/// line is −iκ ∂λ₀/∂F* of the four-level second-order eigenvalue; note the
/// minus sign inside the Ω₁ phase term.
pub fn rhs_closed_form(state: &FieldState, params: &SystemParams, include_phase_terms: bool) -> Result<FieldDerivatives> {
    let s = state.check_propagatable()?;
    let FieldState { omega1: o1, omega2: o2, e1, e2 } = *state;
    let [i_o1, i_o2, i_e1, i_e2] = state.intensities();
    let k = params.kappa / params.delta;
    let s2 = s * s;

    let mut d_e1 = -I * k * (o1.conj() * o1 * o1 * o2 * e2.conj() - e1 * e1 * e2 * o1.conj() * o2.conj()) / s2;
    let mut d_e2 = -I * k * o1 * o2 * e1.conj() / s;
    let mut d_o1 = I * k * (o1 * o1 * o2 * e1.conj() * e2.conj() - i_e1 * e1 * e2 * o2.conj()) / s2;
    let mut d_o2 = -I * k * e1 * e2 * o1.conj() / s;

    if include_phase_terms {
        d_e1 += -I * k * i_o1 * (i_o2 - i_e2) / s2 * e1;
        d_e2 += I * k * i_e1 / s * e2;
        d_o1 += I * k * i_e1 * (i_o2 - i_e2) / s2 * o1;
        d_o2 += I * k * i_o1 / s * o2;
    }
    Ok(FieldDerivatives { d_omega1: d_o1, d_omega2: d_o2, d_e1, d_e2 })
}

/// dF/dζ = −iκ ∂λ/∂F*, with λ chosen by `spec`. The exact backend starts the
/// branch from |1⟩; use [`Backend`] to continue it along a trajectory.
pub fn rhs_eigen_gradient(state: &FieldState, params: &SystemParams, spec: &BackendSpec) -> Result<FieldDerivatives> {
    let backend = Backend::new(*params, *spec)?;
    backend.evaluate(state, &BranchReference::ground()).map(|e| e.derivatives)
}

/// One right-hand-side evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub derivatives: FieldDerivatives,
    /// Eigenvector of the tracked branch (exact backend only).
    pub branch_vector: Option<DVector<Complex64>>,
}

/// A configured right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct Backend {
    pub params: SystemParams,
    pub spec: BackendSpec,
}

impl Backend {
    pub fn new(params: SystemParams, spec: BackendSpec) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, spec })
    }

    pub fn evaluate(&self, state: &FieldState, reference: &BranchReference) -> Result<Evaluation> {
        let p = &self.params;
        match self.spec.method {
            Method::ClosedForm => {
                let derivatives = rhs_closed_form(state, p, self.spec.phase_terms_active())?;
                Ok(Evaluation { derivatives, branch_vector: None })
            }
            Method::PertEigenGradient => {
                state.check_propagatable()?;
                let grad = levelsys::pert_gradient(self.pert_model(), state, p.delta)?;
                let derivatives = FieldDerivatives::from_array(grad.map(|g| -I * p.kappa * g));
                Ok(Evaluation { derivatives, branch_vector: None })
            }
            Method::ExactEigenGradient => {
                state.check_propagatable()?;
                // Fields in Ω₀ units; the Hamiltonian wants absolute frequencies.
                let omega0 = p.omega0();
                let physical = state.scaled(omega0);
                let branch = levelsys::exact_ground_branch(self.spec.model, &physical, p, reference)?;
                let derivatives = FieldDerivatives::from_array(branch.gradient.map(|g| -I * p.kappa / omega0 * g));
                if !derivatives.is_finite() {
                    return Err(Error::ConvergenceFailure { residual: f64::NAN, bound: 0.0 });
                }
                Ok(Evaluation { derivatives, branch_vector: Some(branch.vector) })
            }
        }
    }

    /// The eigenvalue generating the dynamics, in units of Ω₀²/Δ·Δ (i.e. the
    /// second-order value with fields in Ω₀ units). For the exact backend this
    /// is Re λ / Ω₀².
    pub fn lambda0(&self, state: &FieldState, reference: &BranchReference) -> Result<f64> {
        match self.spec.method {
            Method::ClosedForm | Method::PertEigenGradient => levelsys::lambda0_pert(self.pert_model(), state, self.params.delta),
            Method::ExactEigenGradient => {
                let omega0 = self.params.omega0();
                let branch = levelsys::exact_ground_branch(self.spec.model, &state.scaled(omega0), &self.params, reference)?;
                Ok(branch.value.re / (omega0 * omega0))
            }
        }
    }

    /// The perturbative eigenvalue whose gradient reproduces the closed-form
    /// equations: the full four-level value with phase terms, otherwise the
    /// mixing term alone (identical to the five-level value).
    fn pert_model(&self) -> Model {
        if self.spec.phase_terms_active() {
            Model::FourLevel
        } else {
            Model::FiveLevel
        }
    }
}
