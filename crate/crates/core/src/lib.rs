//! Determination of S-curves, equilibrium densities and phase diagrams for
//! orthogonal polynomials with polynomial exponential weights.
//!
//! The pipeline goes: solve the endpoint equations for the spectral curve
//! `y^2 = W'^2 + f` ([`onecut`], [`twocut`], [`abelian`]), trace the Stokes
//! lines of `y^2 (dz)^2` and check density positivity and S-curve
//! embeddability ([`stokes`]), classify phases over the parameter plane
//! ([`phase`]), and cross-check against high-precision zeros of the actual
//! orthogonal polynomials ([`orthopoly`]).

pub mod algebra;
pub mod abelian;
pub mod error;
pub mod onecut;
pub mod orthopoly;
pub mod phase;
pub mod quad;
pub mod stokes;
pub mod twocut;

pub use error::{Error, Result};
