use leakdpt::bounds::BoundsError;
use leakdpt::diqkd::DiqkdError;
use leakdpt::dpt::DptError;
use leakdpt::games::GameError;
use thiserror::Error;

/// Failures mapped to exit codes: 1 for usage errors (bad flags, files or
/// parameter values), 2 for computation errors.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Compute(_) => 2,
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::InvalidGame(_) | GameError::UnknownBuiltin(_) | GameError::Json(_) | GameError::Mismatch(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::InvalidInput(_) => CliError::Usage(e.to_string()),
            BoundsError::Game(g) => g.into(),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<DptError> for CliError {
    fn from(e: DptError) -> Self {
        match e {
            DptError::InvalidParams(_) => CliError::Usage(e.to_string()),
            DptError::Game(g) => g.into(),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<DiqkdError> for CliError {
    fn from(e: DiqkdError) -> Self {
        match e {
            DiqkdError::InvalidParams(_) | DiqkdError::Json(_) => CliError::Usage(e.to_string()),
            DiqkdError::Game(g) => g.into(),
            _ => CliError::Compute(e.to_string()),
        }
    }
}
