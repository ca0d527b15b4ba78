use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parameters are not in diagonal mode (need c2 = c1 and alpha2 = 2 alpha1): {0}")]
    Mode(String),
    #[error("zero-mass constraint violated (integral of A over xi must vanish for every eta): {0}")]
    Constraint(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("blow-up in {what}; last finite time {last_finite_time}")]
    BlowUp { what: String, last_finite_time: f64 },
    #[error("initial data rejected: {}", .0.join("; "))]
    Rejected(Vec<String>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
