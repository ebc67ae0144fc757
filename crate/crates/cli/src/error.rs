use relstab_core::Error as CoreError;

/// Exit status for a completed analysis, whatever its verdict.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONSISTENCY: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed request, unknown case, or a configuration that cannot be
    /// analysed (collision, not central).
    #[error("input error: {0}")]
    Input(String),

    /// The pipeline disagrees with itself.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn from_core(e: CoreError) -> Self {
        match e {
            CoreError::InvalidConfiguration(_)
            | CoreError::InvalidPotential(_)
            | CoreError::Collision { .. }
            | CoreError::NotCentral { .. }
            | CoreError::DimensionMismatch { .. }
            | CoreError::InvalidArgument(_)
            | CoreError::NoConvergence { .. } => CliError::Input(e.to_string()),
            other => CliError::Consistency(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } | CliError::Json(_) => EXIT_INPUT,
            CliError::Consistency(_) => EXIT_CONSISTENCY,
        }
    }
}
