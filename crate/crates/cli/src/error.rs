use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("{origin}{}: field `{field}`: {message}", line.map(|l| format!(", line {l}")).unwrap_or_default())]
    Field {
        origin: String,
        line: Option<usize>,
        field: String,
        message: String,
    },
    /// A command-line flag rejected after parsing.
    #[error("--{flag}: {message}")]
    Flag { flag: &'static str, message: String },
    #[error(transparent)]
    Core(#[from] risfda::Error),
    #[error("writing output: {0}")]
    Output(String),
    #[error("verification failed: {failed} of {total} checks outside tolerance")]
    Verification { failed: usize, total: usize },
}

impl CliError {
    /// 2 for a failed verification, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification { .. } => 2,
            _ => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
