//! Shared value types and the exponent admissibility gates.

mod field;
mod grid;
mod matrix;
mod regime;
mod region;
mod report;

pub use field::{simplex_gradient, DiscreteField};
pub use grid::{Grid, Simplex};
pub use matrix::GradMat;
pub use regime::{
    classical_gates, validate_regime, Admissibility, AdmissibilityRule, ClassicalGates, Regime,
};
pub use region::{Region, RegionKind};
pub use report::{CheckReport, DiagnosticsEntry, DiagnosticsReport, SolveReport};
