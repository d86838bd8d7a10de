// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

/// Failure of a CLI run, carrying its exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(chargeq::Error),
    #[error("did not converge: {0}")]
    NonConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Numerical(_) => 1,
            CliError::NonConvergence(_) => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Errors raised while checking a config are config errors.
pub(crate) fn config_err(e: chargeq::Error) -> CliError {
    CliError::Config(e.to_string())
}

/// Errors raised during a computation keep their numerical meaning.
pub(crate) fn compute_err(e: chargeq::Error) -> CliError {
    match e {
        chargeq::Error::NonConvergence(msg) => CliError::NonConvergence(msg),
        other => CliError::Numerical(other),
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
