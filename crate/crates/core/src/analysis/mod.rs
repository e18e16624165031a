//! Invariants, conversion metrics, analytic predictions and ε-sweeps.

mod conversion;
mod invariants;
mod predict;
mod sweep;

pub use conversion::{detect_conversion, ConversionMetrics, CycleWatch, MetricSource, Validity};
pub use invariants::{invariants_of, relative_phase, InvariantValues, PHASE_THRESHOLD};
pub use predict::{predict_no_phase, predict_with_phase, SeedSpec, EXTRAPOLATION_EPSILON, MAX_EPSILON};
pub use sweep::{fit_line, fit_log_log, log_grid, measure_conversion, sweep_epsilon, LineFit, SweepRow, SweepTable};
