use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, Error)]
pub enum EntglError {
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("subsystem index {index} out of range for {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },
    #[error("operation requires a bipartite state, got {0} subsystems")]
    NotBipartite(usize),
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    WrongDimension {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("invalid Schmidt order n={n} for dimension d={d}")]
    InvalidOrder { n: usize, d: usize },
    #[error("party count {0} exceeds the enumeration bound {1}")]
    PartyCountTooLarge(usize, usize),
    #[error("criterion value {0} does not exceed 1; no witness can be built")]
    NotDetected(f64),
    #[error("vector is not a unit vector")]
    NotUnitVector,
    #[error("projection rows are not orthonormal")]
    NotOrthonormal,
    #[error("state is PPT; the check requires an NPT input")]
    StateIsPpt,
    #[error("total dimension {0} exceeds the size cap {1}")]
    SizeCapExceeded(usize, usize),
}
