//! Numerical toolkit for entanglement detection and distillation.
//!
//! The crate covers separability tests on density matrices (partial
//! transposition, realignment and the general permutation criteria),
//! entanglement and Schmidt-number witnesses with the operator/map
//! correspondence, constructors for the named state families used in the
//! bound-entanglement literature, randomized one- and n-copy distillability
//! tests, pure-state transformation laws, and a Monte Carlo harness that
//! estimates the volume of distillable states.

pub mod distill;
pub mod linalg;
pub mod montecarlo;
pub mod permcrit;
pub mod protocol;
pub mod qstate;
pub mod robustness;
pub mod witness;
pub mod zoo;

mod error;

pub use error::EntglError;
pub use qstate::{ComplexMatrix, PureStateVector, QuantumState, SchmidtData};

pub type Result<T> = std::result::Result<T, EntglError>;

/// Numerical tolerances shared across the crate.
///
/// Hermiticity and trace tolerances are relative to the matrix 1-norm;
/// the rest are absolute. Double precision with matrices of order <= 81
/// keeps rounding well below these.
pub mod tol {
    /// Hermiticity tolerance (relative to the 1-norm).
    pub const HERM: f64 = 1e-10;
    /// Unit-trace tolerance (relative to the 1-norm).
    pub const TRACE: f64 = 1e-10;
    /// Positive-semidefiniteness slack on the smallest eigenvalue.
    pub const PSD: f64 = 1e-9;
    /// Threshold below which a Schmidt coefficient counts as zero.
    pub const RANK: f64 = 1e-9;
    /// Unit-norm tolerance for state vectors.
    pub const NORM: f64 = 1e-10;
    /// Reconstruction tolerance for decompositions.
    pub const REC: f64 = 1e-10;
    /// Witness trace-identity tolerance.
    pub const WIT: f64 = 1e-8;
    /// Detection precision of the distillability search.
    pub const DISTILL_PRECISION: f64 = 1e-8;
}
