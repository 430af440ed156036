//! Numerical machinery for isoperiodic deformations of Abelian differentials
//! of the second kind on the elliptic family `v^2 = u(u-1)(u-x)`.
//!
//! The library computes periods and differential data on the curve by contour
//! quadrature with square-root branch tracking, evaluates the Bell-polynomial
//! quantities that encode pole-position derivatives of the normalized
//! holomorphic differential, integrates the flow that keeps the periods of a
//! second-kind differential constant while the branch point `x` moves, and
//! builds the associated genus-one theta-function solutions of the Boussinesq
//! equation.
//!
//! Entry points:
//! - [`curve::Curve`] — period data and differential evaluations at a modulus `x`;
//! - [`flow::integrate_flow`] — the isoperiodic trajectory `y0(x)` of the pole;
//! - [`boussinesq::WaveData`] / [`boussinesq::boussinesq_residual`] — theta-function
//!   wave construction and PDE verification;
//! - [`driver::run`] — batch orchestration behind the `isoflow` binary.
//!
//! See the crate `examples/` directory for one runnable example per capability.

pub mod bell;
pub mod boussinesq;
pub mod curve;
pub mod driver;
pub mod error;
pub mod flow;
pub mod numerics;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
