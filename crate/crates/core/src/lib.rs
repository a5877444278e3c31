//! Steady-state biomass gasification with energy and exergy accounting.
//!
//! The pipeline runs from a fuel's ultimate/proximate analysis through an
//! equilibrium producer-gas model to mass, energy, entropy and exergy
//! balances of the gasifier, with parametric sweeps on top.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod exergy;
pub mod fuel;
pub mod gasifier;
pub mod sweep;
pub mod thermo;

pub use analysis::{run_analysis, AnalysisOptions, RunResult};
pub use error::{Error, Result};
