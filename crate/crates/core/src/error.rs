use thiserror::Error;

/// Errors raised by the simulator.
///
/// Domain errors (degenerate kernels, failed filters, unphysical states) are
/// kept distinct from configuration errors so front ends can map them to
/// different exit statuses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("no kernel at tolerance: smallest singular value {smallest:.3e} exceeds {threshold:.3e}")]
    NoKernel { smallest: f64, threshold: f64 },

    #[error("degenerate kernel: dimension {dim} at threshold {threshold:.3e}")]
    DegenerateKernel { dim: usize, threshold: f64 },

    #[error("unphysical steady state: minimum eigenvalue {min_eigenvalue:.3e}")]
    UnphysicalState { min_eigenvalue: f64 },

    #[error("filter success probability {p_suc:.3e} is vanishing")]
    VanishingSuccess { p_suc: f64 },

    #[error("integration unstable: trace drift {drift:.3e}")]
    Instability { drift: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Whether this error stems from configuration or input handling rather
    /// than from the physics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Io(_))
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NoKernel { .. } => "no_kernel",
            Error::DegenerateKernel { .. } => "degenerate_kernel",
            Error::UnphysicalState { .. } => "unphysical_state",
            Error::VanishingSuccess { .. } => "vanishing_success",
            Error::Instability { .. } => "instability",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
