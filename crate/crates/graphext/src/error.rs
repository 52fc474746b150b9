use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] graphext_core::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn json(e: serde_json::Error) -> Self {
        CliError::Json { line: e.line(), column: e.column(), message: e.to_string() }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
