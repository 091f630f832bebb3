use std::path::PathBuf;

/// Failures of the driver, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ringclass_core::Error),
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("output: {0}")]
    Output(String),
    #[error("self-test failed: {0} check(s)")]
    SelfTest(usize),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 usage, 2 domain (including poles and malformed input files),
    /// 3 numeric non-convergence, 4 coverage, 5 failed self-test.
    pub fn exit_code(&self) -> i32 {
        use ringclass_core::Error as E;
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(E::Domain(_) | E::Pole(_)) | CliError::Parse { .. } | CliError::Io { .. } => 2,
            CliError::Core(E::Numeric(_)) | CliError::Output(_) => 3,
            CliError::Core(E::Coverage(_)) => 4,
            CliError::SelfTest(_) => 5,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
