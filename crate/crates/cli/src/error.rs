use std::path::PathBuf;

use provar_core::cloud::CloudError;
use provar_core::fit::FitError;
use provar_core::measure::MeasureError;
use provar_core::poly::{ParsePolyError, PolyError};
use provar_core::stats::StatsError;
use provar_core::topology::TopologyError;
use provar_core::variety::VarietyError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid value for {flag}: {reason}")]
    Validation { flag: &'static str, reason: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    ParsePoly {
        path: PathBuf,
        source: ParsePolyError,
    },
    #[error("{}: {source}", path.display())]
    ReadCloud { path: PathBuf, source: CloudError },
    #[error("density validation failed: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Cloud(#[from] CloudError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn invalid(flag: &'static str, reason: impl Into<String>) -> Self {
        CliError::Validation {
            flag,
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
