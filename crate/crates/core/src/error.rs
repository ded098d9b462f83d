use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("degenerate dimension d = {0}: the identity and swap coincide or the index set is too small")]
    DegenerateDimension(usize),

    #[error("parity error: {0}")]
    Parity(String),

    #[error("dimension {0} is not an odd prime")]
    Primality(usize),

    #[error("operator is not in the K subspace: A-component norm {residual:e} exceeds {tolerance:e}")]
    SubspaceViolation { residual: f64, tolerance: f64 },

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical integration did not converge: {0}")]
    Integration(String),

    #[error("state has only {0:e} probability mass inside the discretisation window")]
    OutsideWindow(f64),

    #[error("invalid density matrix: {0}")]
    NotDensity(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid key: {0}")]
    Key(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Integration(_) | Error::OutsideWindow(_) | Error::NotDensity(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
