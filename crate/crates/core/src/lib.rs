//! Numerical laboratory for supersymmetric partner potentials.
//!
//! * [`numgrid`]: uniform grids and discrete calculus.
//! * [`potentials`]: superpotential catalog, expression trees, `V∓ = W² ∓ W′`.
//! * [`eigensolve`]: Sturm-bisection finite-difference eigensolver.
//! * [`susyqhj`]: quantum momentum functions, intertwiners, node-count and
//!   winding checks.
//! * [`deform`]: one-parameter isospectral deformation of a partner pair.

pub mod deform;
pub mod eigensolve;
pub mod error;
pub mod numgrid;
pub mod potentials;
pub mod susyqhj;

pub use error::{Error, Result};

/// Version of the numerical core, recorded in scenario reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
