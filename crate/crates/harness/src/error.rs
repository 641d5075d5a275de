use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Help or version text requested; not a failure.
    #[error("{0}")]
    Help(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("run failed (beta = {beta}, r = {r}, seed = {seed}): {source}")]
    Run {
        beta: f64,
        r: u32,
        seed: u64,
        #[source]
        source: drpa_core::Error,
    },
    #[error(transparent)]
    Core(#[from] drpa_core::Error),
    #[error("report is missing data for {0}")]
    IncompleteReport(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl HarnessError {
    /// Process exit code: 0 help, 1 configuration or input, 2 runtime, 3 io.
    pub fn exit_code(&self) -> i32 {
        use drpa_core::Error as E;
        match self {
            HarnessError::Help(_) => 0,
            HarnessError::Core(E::InvalidConfig(_) | E::InvalidInput(_)) => 1,
            HarnessError::Config(_) | HarnessError::InvalidInput(_) => 1,
            HarnessError::Run { .. } | HarnessError::Core(_) | HarnessError::IncompleteReport(_) => 2,
            HarnessError::Io { .. } | HarnessError::Csv { .. } | HarnessError::Json { .. } => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Csv { path, source }
    }
}
