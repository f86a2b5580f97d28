//! Reconstruction of piecewise-constant doping profiles from voltage–current
//! data of linearized drift-diffusion models.
//!
//! The crate is organised bottom-up:
//!
//! - [`grid`]: the node lattice on the unit square and its discrete operators;
//! - [`elliptic`]: mixed-boundary diffusion solves and the equilibrium
//!   Poisson–Boltzmann problem;
//! - [`forward`]: γ ↔ C conversions and the Dirichlet-to-Neumann style
//!   measurement operators with derivative and adjoint;
//! - [`regtools`]: dense SVD-based regularization;
//! - [`invert`]: Landweber, Landweber–Kaczmarz and level-set engines;
//! - [`harness`]: phantoms, noise, configuration and experiment runs;
//! - [`oracle`]: independent reference computations used for verification.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elliptic;
pub mod error;
pub mod forward;
pub mod grid;
pub mod harness;
pub mod invert;
pub mod oracle;
pub mod regtools;

pub use elliptic::{DirichletData, SolverOptions};
pub use error::{Error, Result};
pub use forward::{
    DeviceModel, ForwardModel, MeasurementKind, MeasurementSet, ModelParams, Outputs,
};
pub use grid::{build_grid, BoundaryTrace, Grid, ScalarField, Segment};
