use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error on line {line}{}: {msg}", .key.as_ref().map(|k| format!(" (key '{k}')")).unwrap_or_default())]
    Parse { line: usize, key: Option<String>, msg: String },

    #[error("invalid scenario: {0}")]
    Invalid(String),

    #[error("infeasible input: {0}")]
    Infeasible(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] cavelast_core::Error),

    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn parse(line: usize, key: Option<&str>, msg: impl Into<String>) -> Self {
        Self::Parse { line, key: key.map(str::to_string), msg: msg.into() }
    }

    /// 2 for input that cannot be run (malformed, invalid or infeasible), 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse { .. } | Self::Invalid(_) | Self::Infeasible(_) => 2,
            Self::Core(e) if is_input_error(e) => 2,
            _ => 1,
        }
    }
}

fn is_input_error(e: &cavelast_core::Error) -> bool {
    use cavelast_core::Error as E;
    matches!(e, E::Config(_) | E::Mesh(_) | E::Infeasible { .. } | E::Domain { .. } | E::DomainScalar(_) | E::Parse { .. })
}
