use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {target}: {message}")]
    Write { target: String, message: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] hh_core::Error),
}

impl CliError {
    /// Process exit status for the error.
    pub fn exit_code(&self) -> u8 {
        use hh_core::Error as E;
        match self {
            CliError::Read { .. } | CliError::Write { .. } => 1,
            CliError::Config(_) => 3,
            CliError::Core(E::Divergence { .. } | E::InnerDivergence { .. }) => 4,
            CliError::Core(_) => 3,
        }
    }

    /// Short machine-readable tag for the error entry of a report.
    pub fn kind(&self) -> &'static str {
        use hh_core::Error as E;
        match self {
            CliError::Read { .. } | CliError::Write { .. } => "io",
            CliError::Config(_) => "config",
            CliError::Core(e) => match e {
                E::InvalidInput(_) | E::DimensionMismatch { .. } | E::Parse(_) => "invalid_input",
                E::Evaluation { .. } | E::Domain(_) => "domain",
                E::Precondition(_) => "precondition",
                E::MissingSphereMeasure => "missing_sphere_measure",
                E::Divergence { .. } | E::InnerDivergence { .. } => "divergence",
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
