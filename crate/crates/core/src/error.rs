use thiserror::Error;

use crate::channel::Position2D;

/// Invalid channel or geometry construction.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{0} path list is empty")]
    NoPaths(&'static str),
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("carrier wavelength must be positive and finite, got {0}")]
    InvalidWavelength(f64),
    #[error("antenna array has no elements")]
    EmptyArray,
    #[error("antenna element {0} has a non-finite coordinate")]
    NonFiniteElement(usize),
    #[error("antenna element {0} duplicates an earlier element")]
    DuplicateElement(usize),
    #[error("region half side must be finite and non-negative, got {0}")]
    InvalidRegion(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScaError {
    #[error("start position ({}, {}) lies outside the move region", .0.x, .0.y)]
    StartOutsideRegion(Position2D),
    #[error("invalid SCA configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed configuration: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

impl ConfigError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field,
            reason: reason.into(),
        }
    }
}

/// Errors surfaced by the simulation harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sca(#[from] ScaError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot aggregate an empty set of trial records")]
    EmptyRecords,
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
