//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by construction, enumeration, and numeric routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("enumeration of {needed} terms exceeds the cap of {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("kernel `{kernel}` is not symmetric under argument permutation")]
    NonSymmetric { kernel: String },

    #[error("kernel is degenerate: variance {variance} is at or below tolerance")]
    DegenerateKernel { variance: f64 },

    #[error("kernel is trivial: every projection variance is at or below the rank tolerance")]
    TrivialKernel,

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("sample too short: need {needed} points, got {got}")]
    SampleTooShort { needed: usize, got: usize },

    #[error("statistic not ready: {have} points fed, need at least {need}")]
    NotReady { have: usize, need: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid psi function: {0}")]
    InvalidPsi(String),

    #[error("norm diverges: ratio still growing by {growth:.3e} per decade at p = {at_p:.3e}")]
    DivergentNorm { at_p: f64, growth: f64 },

    #[error("conjugate unbounded: objective still increasing at x = {at:.3e} for slope y = {y}")]
    Unbounded { y: f64, at: f64 },

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("degenerate variance: sigma(n) is zero for n = {n}")]
    DegenerateVariance { n: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
