//! Exact and numerical solutions of the reduced Maxwell-Bloch equations for a
//! three-level Lambda medium driven by two optical fields.
//!
//! * [`algebra`] — fixed-size complex 3x3 linear algebra.
//! * [`model`] — parameters, Hamiltonian, Lax matrices, density matrices.
//! * [`darboux`] — dressing of the background solution.
//! * [`analytic`] — closed-form solutions.
//! * [`mbsolver`] — finite-difference propagation of the PDE system.
//! * [`verify`] — residuals, audits and velocity measurement.

pub mod algebra;
pub mod analytic;
pub mod darboux;
pub mod error;
pub mod mbsolver;
pub mod model;
pub mod verify;

pub use error::{Error, Result};
