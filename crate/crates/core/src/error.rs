use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not symmetric positive definite: pivot {pivot:e} at row {index}")]
    NotSpd { index: usize, pivot: f64 },
    #[error("matrix is not symmetric: entry ({row}, {col}) differs from its transpose")]
    NotSymmetric { row: usize, col: usize },
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("subspace basis has no columns")]
    EmptySubspace,
    #[error("dense size limit exceeded: dimension {size} > {limit}")]
    SizeLimitExceeded { size: usize, limit: usize },
    #[error("the differential vanishes on the complement of its kernel")]
    ZeroDifferential,
    #[error("non-positive input: {0}")]
    NonPositiveInput(&'static str),
    #[error("initial data is incompatible: residual {residual:e} exceeds {threshold:e}")]
    IncompatibleInitialData { residual: f64, threshold: f64 },
    #[error("saddle system is singular: damping is not definite on the kernel")]
    SingularSaddle,
    #[error("time step must be positive, got {0}")]
    NonPositiveTau(f64),
    #[error("delta {delta} outside (0, {delta_star}]")]
    InvalidDelta { delta: f64, delta_star: f64 },
    #[error("energy at index {index} is not positive")]
    NonPositiveEnergy { index: usize },
    #[error("fit window holds {len} samples, need at least 3")]
    WindowTooShort { len: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("eigenvalue iteration did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("mode index {index} out of range (dimension {dim})")]
    ModeOutOfRange { index: usize, dim: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
