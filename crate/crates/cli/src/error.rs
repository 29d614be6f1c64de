use std::fmt;

use triad_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration; the string names the key path where known.
    Config(String),
    /// Integrator, quadrature or invariant failure.
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn config(path: impl AsRef<str>, msg: impl fmt::Display) -> Self {
        let path = path.as_ref();
        if path.is_empty() || path == "." {
            CliError::Config(msg.to_string())
        } else {
            CliError::Config(format!("`{path}`: {msg}"))
        }
    }

    /// Attributes a core error to a config section.
    pub fn from_core(context: &str, e: CoreError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(format!("{context}: {e}"))
        } else {
            CliError::config(context, e)
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
