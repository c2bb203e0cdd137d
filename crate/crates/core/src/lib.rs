//! Generalized holomorphic equilibrium propagation for convergent dynamical networks.
//!
//! The crate relaxes layered networks to their fixed points, estimates
//! neuronal error vectors with one-sided, N-point and continuous-time
//! holomorphic nudges, compares them against implicit-differentiation and
//! recurrent-backpropagation oracles, and regularizes the Jacobian towards
//! symmetry with a Hutchinson-estimated homeostatic loss.

pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod estimators;
pub mod fixedpoint;
pub mod homeostasis;
pub mod linalg;
pub mod models;
pub mod scalar;
pub mod training;
pub mod verify;

pub use error::{Error, Result};
pub use fixedpoint::{
    relax, relax_path, residual, Dynamics, FixedPointResult, NetworkState, SolverSettings,
};
pub use models::{Bound, Dims, GradientEstimate, ModelKind, ModelParams, Network, NudgeSpec};
pub use scalar::C64;
