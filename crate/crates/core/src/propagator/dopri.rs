//! Dormand–Prince 5(4) with FSAL and the 4th-order continuous extension.
//!
//! The state is the four complex fields. Local error is controlled per field:
//! |err_k| ≤ abs_tol + rel_tol·max(|y_k|, |y_k'|).

use num_complex::Complex64;

type State = [Complex64; 4];


const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// y + h Σ cᵢ kᵢ
pub(crate) fn combine(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        if *c == 0.0 {
            continue;
        }
        for i in 0..4 {
            out[i] += k[i] * (h * c);
        }
    }
    out
}

/// Result of one trial step.
pub(crate) struct Trial {
    pub y_new: State,
    pub k7: State,
    pub err_norm: f64,
    dense: [State; 5],
}

impl Trial {
    /// Interpolated state at fraction θ ∈ [0, 1] of the step.
    pub fn interpolate(&self, theta: f64) -> State {
        let [r1, r2, r3, r4, r5] = &self.dense;
        let t1 = 1.0 - theta;
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for i in 0..4 {
            out[i] = r1[i] + (r2[i] + (r3[i] + (r4[i] + r5[i] * t1) * theta) * t1) * theta;
        }
        out
    }
}

/// Stage evaluations for one step of size h from (y, k1). `f` may fail; the
/// failure is returned unchanged so the caller can shrink the step.
pub(crate) fn try_step<F, E>(f: &mut F, y: &State, k1: &State, h: f64, rel_tol: f64, abs_tol: f64) -> Result<Trial, E>
where
    F: FnMut(&State) -> Result<State, E>,
{
    let k2 = f(&combine(y, h, &[(A21, k1)]))?;
    let k3 = f(&combine(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = f(&combine(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = f(&combine(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
    let k6 = f(&combine(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
    let y_new = combine(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = f(&y_new)?;

    let zero = [Complex64::new(0.0, 0.0); 4];
    let err = combine(&zero, h, &[(E1, k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);
    let err_norm = (0..4)
        .map(|i| err[i].norm() / (abs_tol + rel_tol * y[i].norm().max(y_new[i].norm())))
        .fold(0.0, f64::max);

    let mut r2 = [Complex64::new(0.0, 0.0); 4];
    let mut r3 = r2;
    let mut r4 = r2;
    for i in 0..4 {
        r2[i] = y_new[i] - y[i];
        r3[i] = k1[i] * h - r2[i];
        r4[i] = r2[i] - k7[i] * h - r3[i];
    }
    let r5 = combine(&zero, h, &[(D1, k1), (D3, &k3), (D4, &k4), (D5, &k5), (D6, &k6), (D7, &k7)]);

    Ok(Trial { y_new, k7, err_norm, dense: [*y, r2, r3, r4, r5] })
}

/// Step-size factor from the scaled error norm.
pub(crate) fn step_factor(err_norm: f64) -> f64 {
    if err_norm == 0.0 {
        5.0
    } else {
        (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
    }
}

/// Hairer–Wanner starting step estimate.
pub(crate) fn initial_step<F, E>(f: &mut F, y: &State, k1: &State, rel_tol: f64, abs_tol: f64, max_step: f64) -> Result<f64, E>
where
    F: FnMut(&State) -> Result<State, E>,
{
    let scaled = |v: &State, refy: &State| -> f64 {
        let s: f64 = (0..4)
            .map(|i| {
                let sc = abs_tol + rel_tol * refy[i].norm();
                (v[i].norm() / sc).powi(2)
            })
            .sum();
        (s / 4.0).sqrt()
    };
    let d0 = scaled(y, y);
    let d1 = scaled(k1, y);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(max_step);
    let y1 = combine(y, h0, &[(1.0, k1)]);
    let k2 = f(&y1)?;
    let mut diff = [Complex64::new(0.0, 0.0); 4];
    for i in 0..4 {
        diff[i] = k2[i] - k1[i];
    }
    let d2 = scaled(&diff, y) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    Ok((100.0 * h0).min(h1).min(max_step))
}
