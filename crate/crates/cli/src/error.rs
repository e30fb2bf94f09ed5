use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] mixcone::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 3 for inputs beyond the supported dimension, 2 for everything else
    /// that prevents a verdict.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(mixcone::Error::DimensionBound { .. }) => 3,
            _ => 2,
        }
    }
}
