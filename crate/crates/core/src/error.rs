//! Error taxonomy shared across the workspace.
//!
//! `Input`, `Config` and `Resource` map to CLI exit code 1; `NotCertified`
//! maps to exit code 2 so sweeps can distinguish "bad job" from "conditions
//! not met".

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("input error: {0}")]
    Input(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("solvability not certified: {0}")]
    NotCertified(String),
}

impl CoreError {
    pub fn input(msg: impl Into<String>) -> Self {
        CoreError::Input(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CoreError::Config(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        CoreError::Resource(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        CoreError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
