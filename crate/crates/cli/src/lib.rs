//! Command-line layer for the flux-qubit EIT model: configuration files,
//! parameter sweeps, CSV tables and figure recipes. The `flux-eit` binary is
//! a thin wrapper over [`commands::run`].

pub mod commands;
pub mod config;
pub mod lab;
pub mod recipes;
pub mod table;

use serde_json::json;

pub use config::{parse_config, ConfigError, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(ConfigError),
    Model(flux_eit::error::Error),
    Io { path: String, message: String },
    /// A check run by the command failed (oracle tolerance, recipe consistency).
    Check(String),
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        use flux_eit::error::Error as E;
        match self {
            CliError::Config(_) => "config",
            CliError::Model(E::InvalidArgument(_)) => "invalid-argument",
            CliError::Model(E::NumericalFailure(_)) => "numerical-failure",
            CliError::Model(E::Bifurcation { .. }) => "bifurcation",
            CliError::Model(E::OracleTimeout(_)) => "oracle-timeout",
            CliError::Model(E::OracleExtraction(_)) => "oracle-extraction",
            CliError::Io { .. } => "io",
            CliError::Check(_) => "check",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Model(_) => 4,
            CliError::Io { .. } => 5,
            CliError::Check(_) => 6,
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        let v = match self {
            CliError::Config(e) => json!({"error": self.kind(), "line": e.line, "key": e.key, "message": e.message}),
            CliError::Model(e) => json!({"error": self.kind(), "message": e.to_string()}),
            CliError::Io { path, message } => json!({"error": self.kind(), "path": path, "message": message}),
            CliError::Check(m) | CliError::Usage(m) => json!({"error": self.kind(), "message": m}),
        };
        v.to_string()
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_json())
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<flux_eit::error::Error> for CliError {
    fn from(e: flux_eit::error::Error) -> Self {
        CliError::Model(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
