use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Parameter(String),

    #[error("analytic eigensystem is only available for valley tau = +1; use numeric_eigensystem for tau = {tau}")]
    UnsupportedAnalyticBranch { tau: i8 },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("effective fields require transport along x (theta = 0), got theta = {theta}")]
    UnsupportedGeometry { theta: f64 },

    #[error("integration would need {steps} steps, more than the limit of {limit}")]
    StepLimit { steps: f64, limit: u64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("table does not match {figure} schema: missing column `{column}`")]
    Schema { figure: String, column: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Schema { .. } => 2,
            Error::Io { .. } => 3,
            Error::Parameter(_)
            | Error::UnsupportedAnalyticBranch { .. }
            | Error::NonHermitian { .. }
            | Error::UnsupportedGeometry { .. }
            | Error::StepLimit { .. } => 4,
        }
    }
}
