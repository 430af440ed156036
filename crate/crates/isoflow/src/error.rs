//! Crate-wide error type.

use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("quadrature did not converge: achieved error estimate {achieved:.3e} after {subdivisions} subdivisions (target {target:.3e})")]
    NonConvergence {
        achieved: f64,
        target: f64,
        subdivisions: usize,
    },

    #[error("ODE step size underflow at t = {t} (step {step:.3e}); likely singularity approach")]
    StepSizeUnderflow { t: f64, step: f64 },

    #[error("ODE solver exceeded {max_steps} steps at t = {t}")]
    MaxStepsExceeded { t: f64, max_steps: usize },

    #[error("right-hand side evaluation failed at t = {t}: {source}")]
    RhsEvaluation {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("function evaluation failed: {0}")]
    Evaluation(String),

    #[error("path passes within clearance {clearance:.3e} of branch point {point}")]
    BranchPointCollision { point: Complex64, clearance: f64 },

    #[error("square-root continuation ambiguous: relative jump {jump:.3} at path parameter {t} not reducible below 0.5")]
    ContinuationAmbiguity { t: f64, jump: f64 },

    #[error("neither loop orientation yields Im(tau) > 0 (tau = {tau})")]
    OrientationError { tau: Complex64 },

    #[error("degenerate curve: x = {x} is within clearance of {{0, 1}}")]
    DegenerateCurve { x: Complex64 },

    #[error("pole position y0 = {y0} collides with ramification point set {{0, 1, x}}")]
    PoleAtRamification { y0: Complex64 },

    #[error("pole collision: |y0 - x| = {dist:.3e} below clearance")]
    PoleCollision { dist: f64 },

    #[error("partition enumeration bound exceeded: l = {l} > 12")]
    PartitionBoundExceeded { l: usize },

    #[error("degenerate deformation: |L_{{n+1}}| = {magnitude:.3e} too small (existence hypothesis fails)")]
    DegenerateDeformation { magnitude: f64 },

    #[error("Bell-table singularity: L_{{n+1}} vanishes at x = {x}, y0 = {y0}")]
    BellSingularity { x: Complex64, y0: Complex64 },

    #[error("trajectory left the validated region at x = {x}")]
    RegionExit { x: Complex64 },

    #[error("theta series truncation insufficient: tail estimate {tail:.3e} exceeds target")]
    TruncationInsufficient { tail: f64 },

    #[error("theta argument too close to the theta divisor: |theta| = {magnitude:.3e}")]
    ThetaDivisorProximity { magnitude: f64 },

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
