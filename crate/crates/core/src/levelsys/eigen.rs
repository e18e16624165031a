//! Eigenpairs of the non-Hermitian Hamiltonians and adiabatic branch tracking.
//!
//! Eigenvalues come from a complex Schur factorization H = Q T Qᴴ; eigenvectors
//! are recovered by back-substitution on the triangular factor and rotated back
//! with Q. Every pair is checked against the residual bound before it is
//! returned.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use super::hamiltonian::ComplexMatrix;
use crate::error::{Error, Result};

/// Residual bound relative to the Frobenius norm of the matrix.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Minimum separation of the two best overlaps before a branch counts as ambiguous.
pub const AMBIGUITY_TOL: f64 = 1e-6;

const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub value: Complex64,
    /// Unit-norm right eigenvector.
    pub vector: DVector<Complex64>,
    /// ‖Hv − λv‖₂
    pub residual: f64,
}

/// All eigenpairs, ordered by (Re λ, Im λ).
pub fn eig_exact(m: &ComplexMatrix) -> Result<Vec<EigenResult>> {
    let h = m.as_matrix();
    let n = m.dim();
    let scale = m.norm();
    let bound = RESIDUAL_TOL * scale.max(f64::MIN_POSITIVE);

    let schur = Schur::try_new(h.clone(), f64::EPSILON, SCHUR_MAX_ITER).ok_or(
        Error::ConvergenceFailure { residual: f64::INFINITY, bound },
    )?;
    let (q, t) = schur.unpack();
    let small = f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        // (T − λI) x = 0 with x_k = 1, x_j = 0 for j > k
        let mut x = DVector::<Complex64>::zeros(n);
        x[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in i + 1..=k {
                acc += t[(i, j)] * x[j];
            }
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            x[i] = -acc / denom;
        }
        let mut v = &q * x;
        let norm = v.norm();
        v /= Complex64::new(norm, 0.0);

        let mut residual = residual_of(h, lambda, &v);
        if residual > bound {
            v = inverse_iteration(h, lambda, v, small);
            residual = residual_of(h, lambda, &v);
        }
        if !(residual <= bound) {
            return Err(Error::ConvergenceFailure { residual, bound });
        }
        out.push(EigenResult { value: lambda, vector: v, residual });
    }
    out.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    Ok(out)
}

fn residual_of(h: &DMatrix<Complex64>, lambda: Complex64, v: &DVector<Complex64>) -> f64 {
    (h * v - v * lambda).norm()
}

fn inverse_iteration(
    h: &DMatrix<Complex64>,
    lambda: Complex64,
    mut v: DVector<Complex64>,
    small: f64,
) -> DVector<Complex64> {
    let n = h.nrows();
    let shifted = h - DMatrix::<Complex64>::identity(n, n) * (lambda + Complex64::new(small, small));
    let lu = shifted.lu();
    for _ in 0..3 {
        match lu.solve(&v) {
            Some(y) if y.norm().is_finite() && y.norm() > 0.0 => {
                let norm = y.norm();
                v = y / Complex64::new(norm, 0.0);
            }
            _ => break,
        }
    }
    v
}

/// Reference used to pick the adiabatic branch.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchReference {
    /// Unit vector on the given basis state (0-indexed; 0 is |1⟩).
    BasisState(usize),
    /// The previous step's eigenvector.
    Vector(DVector<Complex64>),
}

impl BranchReference {
    pub fn ground() -> Self {
        BranchReference::BasisState(0)
    }

    fn overlap(&self, v: &DVector<Complex64>) -> f64 {
        match self {
            BranchReference::BasisState(i) => v[*i].norm(),
            BranchReference::Vector(r) => r.dotc(v).norm() / r.norm(),
        }
    }
}

/// Index into `pairs` of the eigenpair with maximal |⟨reference|v⟩|.
pub fn select_ground_index(pairs: &[EigenResult], reference: &BranchReference) -> Result<usize> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("no eigenpairs to select from".into()));
    }
    let mut ranked: Vec<(usize, f64)> = pairs
        .iter()
        .enumerate()
        .map(|(i, p)| (i, reference.overlap(&p.vector)))
        .collect();
    // Highest overlap first; exact ties ordered by smaller |Im λ|.
    ranked.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then(pairs[a.0].value.im.abs().total_cmp(&pairs[b.0].value.im.abs()))
    });
    if ranked.len() > 1 && ranked[0].1 - ranked[1].1 < AMBIGUITY_TOL {
        return Err(Error::AmbiguousBranch { first: ranked[0].1, second: ranked[1].1 });
    }
    Ok(ranked[0].0)
}

pub fn select_ground_branch(pairs: &[EigenResult], reference: &BranchReference) -> Result<EigenResult> {
    select_ground_index(pairs, reference).map(|i| pairs[i].clone())
}

/// dλ_k/dp = (V⁻¹ (∂H/∂p) V)_kk for every eigenvalue k of a diagonalizable H,
/// where the columns of V are the right eigenvectors in `pairs`.
pub(crate) fn eigenvalue_derivative(
    pairs: &[EigenResult],
    k: usize,
    dh: &DMatrix<Complex64>,
    v_inv: &DMatrix<Complex64>,
) -> Complex64 {
    let vk = &pairs[k].vector;
    let w = v_inv.row(k);
    (w * dh * vk)[(0, 0)]
}

pub(crate) fn eigenvector_matrix(pairs: &[EigenResult]) -> DMatrix<Complex64> {
    let cols: Vec<_> = pairs.iter().map(|p| p.vector.clone()).collect();
    DMatrix::from_columns(&cols)
}
