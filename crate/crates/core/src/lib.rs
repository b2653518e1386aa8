//! Spectral split-step time integration for the semiclassical cubic
//! Schrödinger equation
//!
//! ```text
//! i ∂ₜψ = -(ε/2) Δψ + (1/ε) (U(x) + θ|ψ|²) ψ,        ψ(0,·) = u,
//! ```
//!
//! on a periodic box, discretized pseudo-spectrally. The right-hand side is
//! split into the dispersive part `A(u) = i(ε/2)Δu` and the pointwise part
//! `B(u) = -(i/ε)(U + θ|u|²)u`; both sub-flows are exact (a Fourier
//! multiplier and a phase rotation), and arbitrary s-stage compositions with
//! real coefficients `(aᵢ, bᵢ)` are supported.
//!
//! On top of the stepper sits a defect-based a-posteriori local error
//! estimator (evaluated stage-by-stage alongside the step) and an adaptive
//! step-size controller driven by it. A slow Runge-Kutta method-of-lines
//! solver serves as an independent cross-check.
//!
//! Modules:
//! - [`grid`]: periodic grids, complex fields, FFT plumbing, discrete norms
//! - [`operators`]: the split vector fields, their exact flows and
//!   derivatives, and commutator expressions
//! - [`schemes`]: splitting coefficient tables and composition utilities
//! - [`stepper`]: one splitting step plus the local error estimator
//! - [`controller`]: adaptive and fixed-step time loops
//! - [`oracle`]: independent reference integrator for validation

// Scheme tables carry their published digits verbatim, and `!(x > 0)`-style
// guards reject NaN parameters where `x <= 0` would let them through.
#![allow(clippy::excessive_precision)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Commutator formulas walk several parallel per-axis arrays by index; zipped
// iterators would obscure the algebra.
#![allow(clippy::needless_range_loop)]

pub mod controller;
pub mod grid;
pub mod operators;
pub mod oracle;
pub mod schemes;
pub mod stepper;

pub use controller::{
    adaptive_integrate, adaptive_integrate_observed, fixed_integrate, ControllerConfig, StepTrace,
    Trajectory,
};
pub use grid::{make_grid, spectral_derivative, GridSpec, WaveField};
pub use operators::{
    apply_a, apply_b, apply_f, commutator_aab, commutator_ab, commutator_bba, dflow_b, flow_a,
    flow_b, Potential, PotentialField, ProblemParams,
};
pub use oracle::{oracle_solve, OracleConfig, OracleMethod};
pub use schemes::{builtin_scheme, reference_scheme, triple_jump, SplittingScheme};
pub use stepper::{defect, estimate, split_step, StepIntermediates, StepRecord};

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid problem parameters: {0}")]
    InvalidParams(String),
    #[error("unsupported derivative order {order} (only 1 and 2)")]
    UnsupportedOrder { order: u32 },
    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("triple jump requires an even-order base scheme, got order {0}")]
    OddOrderBase(u32),
    #[error("intermediates have {got} stages but scheme `{scheme}` has {expected}")]
    StageMismatch {
        scheme: String,
        expected: usize,
        got: usize,
    },
    #[error(
        "explicit substep unstable: |λ|·h = {lambda_h:.3e} exceeds the stability bound {bound}; \
         use at least {needed} substeps"
    )]
    Unstable {
        lambda_h: f64,
        bound: f64,
        needed: usize,
    },
    #[error("non-finite value produced during {context}")]
    NonFinite { context: String },
    #[error("step size underflow at t = {time:.6e} (requested h = {h:.3e} < h_min = {h_min:.3e})")]
    StepUnderflow { time: f64, h: f64, h_min: f64 },
    #[error("exceeded max_steps = {max_steps} at t = {time:.6e}")]
    MaxStepsExceeded { max_steps: usize, time: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
