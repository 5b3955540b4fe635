use thiserror::Error;

/// Errors produced by the chain, spectral, disorder, dynamics and topology code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("length mismatch: expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver did not converge for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("eigenpair verification failed: {0}")]
    Unverified(String),

    #[error("realization {realization}: {source}")]
    Realization {
        realization: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("gapless cell (|intra| = |inter| = {0}): winding undefined")]
    Gapless(f64),

    #[error("no mirror transfer detected: {0}")]
    NoTransfer(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Coarse category used for process exit codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidChain(_)
            | Error::LengthMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::Gapless(_)
            | Error::Config(_) => ErrorKind::Config,
            Error::NoConvergence { .. } | Error::Unverified(_) | Error::Structural(_) | Error::NoTransfer(_) => {
                ErrorKind::Solver
            }
            Error::Realization { source, .. } => source.kind(),
            Error::Io { .. } => ErrorKind::Io,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Solver,
    Io,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::Solver => 3,
            ErrorKind::Io => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Config => "config",
            ErrorKind::Solver => "solver",
            ErrorKind::Io => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
