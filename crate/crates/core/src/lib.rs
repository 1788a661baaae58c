//! Continuous hypergeometric orthogonal polynomials of the Askey scheme.
//!
//! Covers the Wilson, continuous dual Hahn, continuous Hahn and
//! Meixner–Pollaczek families: evaluation, connection coefficients,
//! generalized generating functions and the definite integrals that follow
//! from orthogonality.

pub mod arith;
pub mod connections;
mod dd;
pub mod error;
pub mod families;
pub mod hypergeom;
pub mod identities;
pub mod props;
pub mod quadrature;
pub mod record;
pub mod sampling;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
