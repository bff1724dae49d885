use thiserror::Error;

/// Failures surfaced by the command line, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] treecode::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failure, 4 for the resource guard.
    pub fn exit_code(&self) -> i32 {
        use treecode::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                E::NoConvergence { .. } | E::FitFailed(_) | E::ZeroNorm | E::MassLeak(_) => 3,
                E::ResourceGuard(_) => 4,
                E::Io(_) => 1,
                _ => 2,
            },
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
