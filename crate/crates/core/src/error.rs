use thiserror::Error;

/// Errors raised by the analysis pipeline.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type used
/// for the computation so the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("bodies {i} and {j} collide (distance {distance:e})")]
    Collision { i: usize, j: usize, distance: f64 },

    #[error("configuration is not central: residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotCentral { residual: f64, tolerance: f64 },

    #[error("Euler-formula multiplier {euler:e} disagrees with the critical-point residual ({residual:e})")]
    MultiplierMismatch { euler: f64, residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported symmetry group: {0}")]
    UnsupportedGroup(String),

    #[error("multiplicity for irreducible {irrep} is not an integer ({value})")]
    NonIntegerMultiplicity { irrep: String, value: f64 },

    #[error("trace equations are inconsistent: {0}")]
    InconsistentTraces(String),

    #[error("matrix is not invariant under the group action (defect {defect:e})")]
    NotInvariant { defect: f64 },

    #[error("J-compatible pairing failed: {0}")]
    PairingFailure(String),

    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular linear system")]
    Singular,

    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
