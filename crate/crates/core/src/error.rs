// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

use crate::forecast::MethodId;

/// Errors produced anywhere in the recommender pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate observation for series `{id}` at t={t}")]
    DuplicateKey { id: String, t: i64 },
    #[error("collection contains no series")]
    EmptyCollection,
    #[error("series `{0}` has no observed values")]
    AllMissing(String),
    #[error("series too short: need at least {required} observations, got {actual}")]
    InsufficientLength { required: usize, actual: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("zero actual value at position {0}")]
    ZeroActual(usize),
    #[error("degenerate sMAPE pair at position {0}: actual + forecast = 0")]
    DegeneratePair(usize),
    #[error("in-sample seasonal naive scale is zero")]
    ScaleDegenerate,
    #[error("autocorrelation undefined for a zero-variance series")]
    UndefinedAcf,
    #[error("model fitting failed: {0}")]
    Fit(String),
    #[error("no evaluation record for series `{series}` and method {method}")]
    MissingRecord { series: String, method: MethodId },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix has rank 0 after centering")]
    RankZero,
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let line = err
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or_default();
        Error::Parse {
            line,
            message: err.to_string(),
        }
    }
}
