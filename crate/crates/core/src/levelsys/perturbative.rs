//! Second-order (in Ω/Δ) eigenvalue of the branch connected to |1⟩, and its
//! Wirtinger derivatives with respect to the conjugate fields.
//!
//! With A = Ω₁Ω₂E₁*E₂* and S = |Ω₁|² + |E₁|²:
//!
//! ```text
//! four-level:  λ₀ = [ (A + A*) − (|Ω₁|²|Ω₂|² + |E₁|²|E₂|²) ] / (S Δ)
//! five-level:  λ₀ =   (A + A*) / (S Δ)
//! ```
//!
//! The second bracket of the four-level value is the ac-Stark part; the
//! five-level scheme has none.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{FieldSelector, FieldState, DEGENERATE_NORM};
use crate::levelsys::hamiltonian::Model;

fn pump_norm(fields: &FieldState) -> Result<f64> {
    let s = fields.pump_pair_norm();
    if s < DEGENERATE_NORM || !s.is_finite() {
        return Err(Error::DegenerateDenominator(s));
    }
    Ok(s)
}

pub fn lambda0_pert_4(fields: &FieldState, delta: f64) -> Result<f64> {
    let s = pump_norm(fields)?;
    let [i_o1, i_o2, i_e1, i_e2] = fields.intensities();
    let mixing = 2.0 * fields.mixing_product().re;
    let stark = i_o1 * i_o2 + i_e1 * i_e2;
    Ok((mixing - stark) / (s * delta))
}

pub fn lambda0_pert_5(fields: &FieldState, delta: f64) -> Result<f64> {
    let s = pump_norm(fields)?;
    Ok(2.0 * fields.mixing_product().re / (s * delta))
}

pub fn lambda0_pert(model: Model, fields: &FieldState, delta: f64) -> Result<f64> {
    match model {
        Model::FourLevel => lambda0_pert_4(fields, delta),
        Model::FiveLevel => lambda0_pert_5(fields, delta),
    }
}

/// Closed-form ∂λ₀/∂F* for all four fields, in (Ω₁, Ω₂, E₁, E₂) order.
///
/// Built from the quotient rule on N/S with N the numerator, independently of
/// the hand-expanded field equations in the propagator.
pub fn pert_gradient(model: Model, fields: &FieldState, delta: f64) -> Result<[Complex64; 4]> {
    let s = pump_norm(fields)?;
    let FieldState { omega1: o1, omega2: o2, e1, e2 } = *fields;
    let a = fields.mixing_product();

    // ∂(A + A*)/∂F*: only A* = Ω₁*Ω₂*E₁E₂ depends on Ω₁*, Ω₂*; only A on E₁*, E₂*.
    let d_mix = [o2.conj() * e1 * e2, o1.conj() * e1 * e2, o1 * o2 * e2.conj(), o1 * o2 * e1.conj()];
    let d_s = [o1, Complex64::new(0.0, 0.0), e1, Complex64::new(0.0, 0.0)];

    let (num, d_num) = match model {
        Model::FiveLevel => (2.0 * a.re, d_mix),
        Model::FourLevel => {
            let [i_o1, i_o2, i_e1, i_e2] = fields.intensities();
            let stark = i_o1 * i_o2 + i_e1 * i_e2;
            let d_stark = [o1 * i_o2, o2 * i_o1, e1 * i_e2, e2 * i_e1];
            let mut d = [Complex64::new(0.0, 0.0); 4];
            for k in 0..4 {
                d[k] = d_mix[k] - d_stark[k];
            }
            (2.0 * a.re - stark, d)
        }
    };
    let mut grad = [Complex64::new(0.0, 0.0); 4];
    for k in 0..4 {
        grad[k] = (d_num[k] * s - d_s[k] * num) / (s * s * delta);
    }
    Ok(grad)
}

/// Central-difference Wirtinger derivative ∂f/∂F* = ½(∂f/∂x + i ∂f/∂y) of any
/// scalar function of the fields, with F = x + iy the selected field and step
/// h = 1e-6·max(1, |F|).
pub fn grad_conjugate<F>(eigfn: F, fields: &FieldState, which: FieldSelector) -> Result<Complex64>
where
    F: Fn(&FieldState) -> Result<Complex64>,
{
    let z = fields.get(which);
    let h = 1e-6 * z.norm().max(1.0);
    let at = |dz: Complex64| eigfn(&fields.with(which, z + dz));
    let hx = Complex64::new(h, 0.0);
    let hy = Complex64::new(0.0, h);
    let dx = (at(hx)? - at(-hx)?) / (2.0 * h);
    let dy = (at(hy)? - at(-hy)?) / (2.0 * h);
    Ok(0.5 * (dx + Complex64::new(0.0, 1.0) * dy))
}
