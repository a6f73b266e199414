use thiserror::Error;

use magcap_core::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or parameters outside an operation's preconditions.
    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    Internal(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) | CliError::Verification(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        use CoreError::*;
        let msg = e.to_string();
        match e {
            InvalidCurvature(_)
            | OutOfDomain { .. }
            | RadiusOutOfRange { .. }
            | NotClosing { .. }
            | Unsupported(_)
            | ChartMismatch
            | DegenerateLattice
            | WeakField { .. }
            | ZeroField
            | InvalidTolerance(_)
            | InvalidArgument(_)
            | InfeasibleProfile(_) => CliError::Input(msg),
            StepUnderflow { .. }
            | DomainExit { .. }
            | SingularForm(_)
            | DegenerateTrajectory(_)
            | NotClosed(_)
            | CertificationFailed(_) => CliError::Internal(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(format!("json encoding failed: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
