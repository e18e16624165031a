//! Resonantly enhanced four-wave mixing in double-Λ and five-level media.
//!
//! * [`levelsys`] builds the single-atom Hamiltonians and their eigenvalues.
//! * [`propagator`] evaluates the field equations and integrates them along ζ.
//! * [`analysis`] computes invariants, conversion metrics and ε-sweeps.
//! * [`io`] reads and writes the trajectory and sweep CSV files.
//! * [`validation`] runs the end-to-end checks behind the `validate` command.

pub mod analysis;
pub mod error;
pub mod fields;
pub mod io;
pub mod levelsys;
pub mod propagator;
pub mod validation;

pub use error::{Error, Result};
pub use fields::{FieldSelector, FieldState, SystemParams};
