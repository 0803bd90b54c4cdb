use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("invalid input: {0}")]
    Domain(String),

    /// The full N-dimensional space was requested for an instance above the cap.
    #[error("full-space dimension N = {dim} exceeds the cap of {cap}")]
    Capacity { dim: u64, cap: u64 },

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("two lowest eigenvalues are degenerate (gap {gap:e})")]
    Degenerate { gap: f64 },

    #[error("no interior maximum of the success probability in [{t0}, {t1}]")]
    Bracket { t0: f64, t1: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Capacity { .. } | Error::Unsupported(_) | Error::Bracket { .. } => 2,
            Error::NoConvergence { .. } | Error::Degenerate { .. } => 3,
        }
    }
}
