//! Atomic level schemes: interaction Hamiltonians, their exact and
//! perturbative eigenvalues, and the adiabatic branch connected to |1⟩.

mod eigen;
mod hamiltonian;
mod perturbative;

use nalgebra::DVector;
use num_complex::Complex64;

pub use eigen::{
    eig_exact, select_ground_branch, select_ground_index, BranchReference, EigenResult, AMBIGUITY_TOL,
    RESIDUAL_TOL,
};
pub use hamiltonian::{
    build_hamiltonian, build_hamiltonian_4, build_hamiltonian_5, conjugate_field_derivative, ComplexMatrix,
    Model,
};
pub use perturbative::{grad_conjugate, lambda0_pert, lambda0_pert_4, lambda0_pert_5, pert_gradient};

use crate::error::{Error, Result};
use crate::fields::{FieldSelector, FieldState, SystemParams};

/// The tracked exact eigenpair together with ∂λ/∂F* for every field.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundBranch {
    pub value: Complex64,
    pub vector: DVector<Complex64>,
    /// Wirtinger derivatives in (Ω₁, Ω₂, E₁, E₂) order.
    pub gradient: [Complex64; 4],
}

/// Exact eigenvalue of the branch selected by `reference`, for fields given in
/// absolute frequency units, with its conjugate-field derivatives.
///
/// The derivatives are first-order perturbation theory for a non-Hermitian
/// matrix, dλ = w (∂H/∂F*) v with w the matching row of V⁻¹.
pub fn exact_ground_branch(
    model: Model,
    fields: &FieldState,
    params: &SystemParams,
    reference: &BranchReference,
) -> Result<GroundBranch> {
    let h = build_hamiltonian(model, fields, params);
    let pairs = eig_exact(&h)?;
    let k = select_ground_index(&pairs, reference)?;
    let v = eigen::eigenvector_matrix(&pairs);
    let v_inv = v.try_inverse().ok_or(Error::ConvergenceFailure { residual: f64::INFINITY, bound: 0.0 })?;
    let mut gradient = [Complex64::new(0.0, 0.0); 4];
    for which in FieldSelector::ALL {
        let dh = conjugate_field_derivative(model, which);
        gradient[which.index()] = eigen::eigenvalue_derivative(&pairs, k, &dh, &v_inv);
    }
    Ok(GroundBranch { value: pairs[k].value, vector: pairs[k].vector.clone(), gradient })
}
