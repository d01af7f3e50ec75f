use thiserror::Error;

use crate::jaynes_cummings::Branch;

/// Errors produced by the numerical modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("wavefunctions live on different supports")]
    SupportMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cannot normalize a state with zero norm")]
    ZeroNorm,

    #[error("superpotential `{name}` is not finite at x = {x}")]
    NonFiniteSuperpotential { name: String, x: f64 },

    #[error("sign condition indeterminate: W vanishes at boundary node x = {x}")]
    IndeterminateSign { x: f64 },

    #[error("superpotential `{0}` violates the sign condition; no normalizable zero mode")]
    NoZeroMode(String),

    #[error("operator is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("requested {k} eigenpairs from a {dim}-dimensional operator")]
    LevelCountOutOfRange { k: usize, dim: usize },

    #[error("partner level {level} has no partner within {tol:e}")]
    DegeneracyViolation { level: f64, tol: f64 },

    #[error("energy {0:e} is at or below the zero-mode threshold")]
    ZeroEnergy(f64),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("spin expectation length {0} exceeds 1")]
    SpinOutOfRange(f64),

    #[error("partner overlap modulus {0} exceeds 1")]
    OverlapOutOfRange(f64),

    #[error("invalid Jaynes-Cummings parameters: {0}")]
    InvalidJcParams(String),

    #[error("Fock level {n} is outside the certified range 0..={max}")]
    OutsideGuardBand { n: usize, max: usize },

    #[error("numeric spectrum disagrees with the analytic levels at {0:?}")]
    SpectrumMismatch(Vec<(usize, Branch)>),

    #[error("unknown superpotential `{0}`")]
    UnknownSuperpotential(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
