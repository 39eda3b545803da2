use std::path::PathBuf;

use nlgames::analysis::AnalysisError;
use nlgames::rankmodel::simplex::SolverError;
use nlgames::{EngineError, LatticeError, RankError};
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const PARSE: i32 = 2;
    pub const NON_GENERIC: i32 = 3;
    pub const NOT_REALIZABLE: i32 = 4;
    pub const SOLVER: i32 = 5;
    pub const IO: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("feasibility solver failed: {0}")]
    Solver(#[from] SolverError),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Rank(RankError::NonGenericGame(_)) => exit::NON_GENERIC,
            Self::Solver(_) => exit::SOLVER,
            Self::Io { .. } | Self::Output(_) => exit::IO,
            _ => exit::PARSE,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
