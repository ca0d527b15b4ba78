use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] fpukp::Error),
    #[error("{0}")]
    Failed(String),
    #[error("thresholds not met: {0}")]
    Thresholds(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { path: path.into(), message: message.into() }
    }

    /// 2 for anything wrong with the input, 3 for unmet sweep thresholds, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Usage(_) => 2,
            CliError::Run(e) if is_input_error(e) => 2,
            CliError::Thresholds(_) => 3,
            _ => 1,
        }
    }
}

fn is_input_error(e: &fpukp::Error) -> bool {
    use fpukp::Error::*;
    matches!(e, Config(_) | Mode(_) | Constraint(_) | Domain(_) | Rejected(_))
}

pub type CliResult<T> = std::result::Result<T, CliError>;
