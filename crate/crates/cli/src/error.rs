use dcov::DcovError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] DcovError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON input: {0}")]
    Json(#[from] serde_json::Error),
    /// Method and exponent are individually valid but not together.
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    /// 1 for bad input or failed checks, 2 for usage errors, 3 for requests
    /// that are numerically or mathematically inadmissible.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Core(DcovError::InvalidParameter(_)) => 2,
            CliError::Core(e) if e.is_domain_error() => 3,
            _ => 1,
        }
    }
}
