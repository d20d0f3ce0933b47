use std::path::PathBuf;

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    /// Validation failed or a precondition of the requested computation
    /// does not hold.
    Precondition = 2,
    /// The mesh does not resolve the field; retry at finer resolution.
    Inconclusive = 3,
    /// Unparseable command line or configuration.
    Usage = 64,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn status(self) -> &'static str {
        match self {
            ExitCode::Ok => "ok",
            ExitCode::Precondition => "precondition_failed",
            ExitCode::Inconclusive => "inconclusive",
            ExitCode::Usage => "usage",
        }
    }

    /// Classify a library error: resolution-limited failures are
    /// inconclusive, everything else is a failed precondition.
    pub fn of(err: &eigenbundle::Error) -> Self {
        use eigenbundle::Error as E;
        match err {
            E::AtNode { source, .. } => Self::of(source),
            E::Monodromy { .. } | E::AmbiguousMatching { .. } | E::Resolution { .. } | E::Inconclusive { .. } => {
                ExitCode::Inconclusive
            }
            _ => ExitCode::Precondition,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{0}")]
    Validation(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("{path}:{line}: {message}")]
    FieldFile { path: PathBuf, line: usize, message: String },
    #[error(transparent)]
    Compute(#[from] eigenbundle::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Compute(e) => ExitCode::of(e),
            CliError::Validation(_) | CliError::FieldFile { .. } | CliError::Write { .. } => ExitCode::Precondition,
            CliError::Read { .. } | CliError::Config { .. } | CliError::Argument(_) => ExitCode::Usage,
        }
    }
}
