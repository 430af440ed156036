//! Language-agnostic numerical primitives: complex contour quadrature,
//! adaptive initial-value ODE solving and difference-quotient derivatives.

pub mod diff;
pub mod ivp;
pub mod path;
pub mod quadrature;

pub use diff::{central_difference, CentralDifference};
pub use ivp::{solve_ivp, IvpSpec, Trajectory};
pub use path::PathSpec;
pub use quadrature::{integrate_path, integrate_path_param, QuadratureSpec};
