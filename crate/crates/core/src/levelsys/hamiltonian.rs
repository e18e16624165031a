//! Single-atom interaction Hamiltonians (ħ = 1).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldSelector, FieldState, SystemParams};

/// Which level scheme the medium realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Double-Λ system, basis (|1⟩, |2⟩, |3⟩, |4⟩).
    FourLevel,
    /// Double-Λ with |3⟩ split into two levels at ±Δ around the Ω₂ frequency.
    FiveLevel,
}

impl Model {
    pub fn dim(self) -> usize {
        match self {
            Model::FourLevel => 4,
            Model::FiveLevel => 5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Model::FourLevel => "four_level",
            Model::FiveLevel => "five_level",
        }
    }
}

/// Small dense complex matrix (4×4 or 5×5).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() || !(m.nrows() == 4 || m.nrows() == 5) {
            return Err(Error::InvalidInput(format!(
                "expected a 4x4 or 5x5 matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(Self(m))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Entry at 0-indexed (row, col).
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The double-Λ Hamiltonian, a +ħ matrix with −Ω couplings:
///
/// ```text
///  [  0     0    −Ω₂*     −E₁* ]
///  [  0     0    −E₂*     −Ω₁* ]
///  [ −Ω₂   −E₂   Δ − iγ₂   0   ]
///  [ −E₁   −Ω₁    0      −iγ₁  ]
/// ```
pub fn build_hamiltonian_4(fields: &FieldState, params: &SystemParams) -> ComplexMatrix {
    let FieldState { omega1, omega2, e1, e2 } = *fields;
    let z = Complex64::new(0.0, 0.0);
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        z,        z,        -omega2.conj(),               -e1.conj(),
        z,        z,        -e2.conj(),                   -omega1.conj(),
        -omega2,  -e2,      c(params.delta, -params.gamma2), z,
        -e1,      -omega1,  z,                            c(0.0, -params.gamma1),
    ]);
    ComplexMatrix(m)
}

/// The five-level Hamiltonian, written as −ħ times a matrix with +Ω couplings.
/// The |2⟩↔|4⟩ coupling by E₂ carries the opposite sign to the other three
/// split-level couplings:
///
/// ```text
///  −[  0    0    Ω₂*       Ω₂*       E₁*  ]
///   [  0    0    E₂*      −E₂*       Ω₁*  ]
///   [  Ω₂   E₂  −Δ − iγ₂   0         0    ]
///   [  Ω₂  −E₂   0         Δ − iγ₂   0    ]
///   [  E₁   Ω₁   0         0        −iγ₁  ]
/// ```
///
/// The overall sign is opposite to [`build_hamiltonian_4`]; both are kept as
/// written. With γ > 0 the decay enters this matrix as +iγ on the diagonal.
pub fn build_hamiltonian_5(fields: &FieldState, params: &SystemParams) -> ComplexMatrix {
    let FieldState { omega1, omega2, e1, e2 } = *fields;
    let z = Complex64::new(0.0, 0.0);
    #[rustfmt::skip]
    let inner = DMatrix::from_row_slice(5, 5, &[
        z,       z,    omega2.conj(),                   omega2.conj(),                  e1.conj(),
        z,       z,    e2.conj(),                       -e2.conj(),                     omega1.conj(),
        omega2,  e2,   c(-params.delta, -params.gamma2), z,                             z,
        omega2,  -e2,  z,                               c(params.delta, -params.gamma2), z,
        e1,      omega1, z,                             z,                              c(0.0, -params.gamma1),
    ]);
    ComplexMatrix(-inner)
}

pub fn build_hamiltonian(model: Model, fields: &FieldState, params: &SystemParams) -> ComplexMatrix {
    match model {
        Model::FourLevel => build_hamiltonian_4(fields, params),
        Model::FiveLevel => build_hamiltonian_5(fields, params),
    }
}

/// ∂H/∂F*: the constant matrix multiplying the conjugate field F* in H.
///
/// H is affine in each F and F* separately, so this is exact.
pub fn conjugate_field_derivative(model: Model, which: FieldSelector) -> DMatrix<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut d = DMatrix::zeros(model.dim(), model.dim());
    match model {
        Model::FourLevel => {
            let pos = match which {
                FieldSelector::Omega2 => (0, 2),
                FieldSelector::E1 => (0, 3),
                FieldSelector::E2 => (1, 2),
                FieldSelector::Omega1 => (1, 3),
            };
            d[pos] = -one;
        }
        Model::FiveLevel => match which {
            FieldSelector::Omega2 => {
                d[(0, 2)] = -one;
                d[(0, 3)] = -one;
            }
            FieldSelector::E2 => {
                d[(1, 2)] = -one;
                d[(1, 3)] = one;
            }
            FieldSelector::E1 => d[(0, 4)] = -one,
            FieldSelector::Omega1 => d[(1, 4)] = -one,
        },
    }
    d
}
