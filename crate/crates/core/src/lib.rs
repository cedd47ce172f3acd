//! Legendre (p,q)-growth integrands: evaluation and certification, convex
//! duality, the regularized Dirichlet minimization scheme on Kuhn grids, and
//! measurement of regularity estimates on computed minimizers.

pub mod diagnostics;
pub mod duality;
pub mod error;
pub mod growth;
pub mod integrands;
pub mod model;
pub mod sampling;
pub mod solver;

pub use error::{Error, Result};
pub use integrands::IntegrandSpec;
pub use model::{
    CheckReport, DiagnosticsEntry, DiagnosticsReport, DiscreteField, GradMat, Grid, Region,
    Regime, SolveReport,
};
