use std::path::PathBuf;

use pcd_core::geometry::Violations;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const IO: i32 = 1;
    /// Reserved for command-line usage errors (clap's default).
    pub const USAGE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const CONSTRAINT: i32 = 4;
    pub const EMPTY_RESULT: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("config error in {path} at `{field}` (line {line}, column {column}): {message}")]
    Parse {
        path: PathBuf,
        field: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("constraint violation: {0}")]
    Constraint(Violations),

    #[error("no candidate satisfies the query")]
    EmptyResult,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Write { .. } => exit::IO,
            CliError::Parse { .. } | CliError::Config { .. } => exit::CONFIG,
            CliError::Constraint(_) => exit::CONSTRAINT,
            CliError::EmptyResult => exit::EMPTY_RESULT,
        }
    }

    /// Maps a core error raised while handling the config at `path`.
    pub fn from_core(path: &std::path::Path, err: pcd_core::Error) -> Self {
        match err {
            pcd_core::Error::InvalidGeometry(v) => CliError::Constraint(v),
            other => CliError::Config {
                path: path.to_path_buf(),
                message: other.to_string(),
            },
        }
    }
}
