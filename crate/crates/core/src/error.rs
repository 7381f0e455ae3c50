use std::path::PathBuf;

/// Errors produced by the simulator, the optimizer and the sweep harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    OracleFailure { iterations: usize, residual: f64 },

    #[error("unsupported gate for parameter-shift differentiation: {0}")]
    UnsupportedGate(String),

    #[error("run aborted at iteration {iteration}: {reason}")]
    AbortedRun { iteration: usize, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
