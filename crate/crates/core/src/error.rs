//! Crate-wide error type.

/// Errors produced by the simulation and covariance machinery.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An evaluation point sits on a non-removable singularity.
    #[error("singularity: {0}")]
    Singularity(String),

    /// Two inputs were sampled on different time grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A matrix expected to be positive semidefinite is not, beyond tolerance.
    #[error("matrix not positive semidefinite: min eigenvalue {min_eig:e} against spectral radius {radius:e}")]
    NotPsd { min_eig: f64, radius: f64 },

    /// The implicit resolvent step could not be solved at a node.
    #[error("resolvent step failed at node {node} (mode {mode}): {reason}")]
    SolverStep {
        node: usize,
        mode: usize,
        reason: String,
    },

    /// Mittag-Leffler argument outside the supported range.
    #[error("Mittag-Leffler overflow for alpha={alpha}, z={z}")]
    MittagLefflerOverflow { alpha: f64, z: f64 },

    /// Requested operation is outside the implemented scope.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An always-on internal consistency assertion failed.
    #[error("internal consistency check failed: {0}")]
    InternalCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
