//! Field equations of motion and their integration along the moving
//! coordinate ζ = z − ct.

mod dopri;
mod rhs;

use num_complex::Complex64;

pub use rhs::{rhs_closed_form, rhs_eigen_gradient, Backend, BackendSpec, Evaluation, FieldDerivatives, Method};

use crate::analysis::{invariants_of, InvariantValues};
use crate::error::{Error, Result};
use crate::fields::{FieldState, SystemParams};
use crate::levelsys::BranchReference;

/// Halvings allowed on an ambiguous eigenbranch before giving up.
pub const MAX_BRANCH_HALVINGS: usize = 40;

/// Integration window, tolerances and output sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationGrid {
    pub zeta_start: f64,
    pub zeta_max: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub sample_stride: f64,
}

impl Default for PropagationGrid {
    fn default() -> Self {
        Self { zeta_start: 0.0, zeta_max: 200.0, rel_tol: 1e-10, abs_tol: 1e-12, max_step: 1.0, sample_stride: 0.05 }
    }
}

impl PropagationGrid {
    pub fn to(zeta_max: f64) -> Self {
        Self { zeta_max, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.zeta_start.is_finite()
            && self.zeta_max.is_finite()
            && self.zeta_max > self.zeta_start
            && (1e-14..=1e-3).contains(&self.rel_tol)
            && self.abs_tol >= 0.0
            && self.max_step > 0.0
            && self.sample_stride > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid propagation grid: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub zeta: f64,
    pub state: FieldState,
    pub invariants: InvariantValues,
    pub lambda0: f64,
}

/// Fields sampled on a fixed ζ stride.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn zetas(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.zeta)
    }

    pub fn last(&self) -> Option<&TrajectorySample> {
        self.samples.last()
    }
}

/// RHS wrapper that continues the exact eigenbranch from the last accepted
/// step.
struct Tracker<'a> {
    backend: &'a Backend,
    reference: BranchReference,
    last_vector: Option<nalgebra::DVector<Complex64>>,
}

impl Tracker<'_> {
    fn eval(&mut self, y: &[Complex64; 4]) -> Result<[Complex64; 4]> {
        let e = self.backend.evaluate(&FieldState::from_array(*y), &self.reference)?;
        self.last_vector = e.branch_vector;
        Ok(e.derivatives.to_array())
    }

    fn accept(&mut self) {
        if let Some(v) = self.last_vector.take() {
            self.reference = BranchReference::Vector(v);
        }
    }

    fn sample(&self, zeta: f64, state: FieldState) -> Result<TrajectorySample> {
        Ok(TrajectorySample {
            zeta,
            state,
            invariants: invariants_of(&state),
            lambda0: self.backend.lambda0(&state, &self.reference)?,
        })
    }
}

/// Integrates from `grid.zeta_start` to `grid.zeta_max`.
pub fn integrate(initial: &FieldState, params: &SystemParams, spec: &BackendSpec, grid: &PropagationGrid) -> Result<Trajectory> {
    integrate_until(initial, params, spec, grid, |_| false)
}

/// Like [`integrate`], but stops after the first accepted step for which
/// `stop` returns true. `stop` sees all samples emitted so far.
pub fn integrate_until<S>(
    initial: &FieldState,
    params: &SystemParams,
    spec: &BackendSpec,
    grid: &PropagationGrid,
    mut stop: S,
) -> Result<Trajectory>
where
    S: FnMut(&[TrajectorySample]) -> bool,
{
    grid.validate()?;
    initial.check_propagatable()?;
    let backend = Backend::new(*params, *spec)?;
    let mut tracker = Tracker { backend: &backend, reference: BranchReference::ground(), last_vector: None };

    let mut zeta = grid.zeta_start;
    let mut y = initial.to_array();
    let mut k1 = tracker.eval(&y)?;
    tracker.accept();

    let mut samples = vec![tracker.sample(zeta, *initial)?];
    let mut next_index = 1u64;
    let stride_point = |k: u64| grid.zeta_start + k as f64 * grid.sample_stride;

    let mut h = {
        let mut f = |s: &[Complex64; 4]| tracker.eval(s);
        dopri::initial_step(&mut f, &y, &k1, grid.rel_tol, grid.abs_tol, grid.max_step)?
    };
    let end_eps = 1e-12 * grid.zeta_max.abs().max(1.0);
    let mut halvings = 0usize;

    while zeta < grid.zeta_max - end_eps {
        h = h.min(grid.max_step).min(grid.zeta_max - zeta);
        let min_step = 1e-14 * zeta.abs().max(1.0);

        let trial = {
            let mut f = |s: &[Complex64; 4]| tracker.eval(s);
            dopri::try_step(&mut f, &y, &k1, h, grid.rel_tol, grid.abs_tol)
        };
        let trial = match trial {
            Ok(t) => t,
            Err(Error::AmbiguousBranch { .. }) => {
                halvings += 1;
                h *= 0.5;
                if halvings > MAX_BRANCH_HALVINGS || h < min_step {
                    return Err(Error::StepSizeUnderflow { zeta, step: h });
                }
                continue;
            }
            Err(e) => return Err(e),
        };

        if !(trial.err_norm <= 1.0) {
            h *= if trial.err_norm.is_finite() { dopri::step_factor(trial.err_norm).min(1.0) } else { 0.2 };
            if h < min_step {
                return Err(Error::StepSizeUnderflow { zeta, step: h });
            }
            continue;
        }

        halvings = 0;
        let zeta_new = if grid.zeta_max - (zeta + h) <= end_eps { grid.zeta_max } else { zeta + h };
        while stride_point(next_index) <= zeta_new + end_eps && stride_point(next_index) <= grid.zeta_max + end_eps {
            let zs = stride_point(next_index);
            let theta = ((zs - zeta) / h).clamp(0.0, 1.0);
            let state = FieldState::from_array(trial.interpolate(theta));
            samples.push(tracker.sample(zs, state)?);
            next_index += 1;
        }
        tracker.accept();
        y = trial.y_new;
        k1 = trial.k7;
        zeta = zeta_new;
        h *= dopri::step_factor(trial.err_norm);

        if stop(&samples) {
            return Ok(Trajectory { samples });
        }
    }

    if samples.last().is_none_or(|s| s.zeta < grid.zeta_max - end_eps) {
        let state = FieldState::from_array(y);
        samples.push(tracker.sample(grid.zeta_max, state)?);
    }
    Ok(Trajectory { samples })
}
