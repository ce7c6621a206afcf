use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("enumeration cap of {cap} elements exceeded")]
    Overflow { cap: usize },

    #[error("data insufficient: {0}")]
    DataInsufficient(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("schema violation in {source_name} (line {line}): {message}")]
    Schema {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("network: {0}")]
    Network(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::DataInsufficient(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
