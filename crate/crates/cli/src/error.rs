use thiserror::Error;

use crate::ingest::IngestError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Ingest(#[from] IngestError),

    #[error(transparent)]
    Model(#[from] cmnb::Error),

    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),

    #[error("cannot encode report: {0}")]
    Encode(#[from] serde_json::Error),
}

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const INPUT: u8 = 1;
    pub const NUMERICAL: u8 = 2;
    pub const INTERNAL: u8 = 3;
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use cmnb::Error as E;
        match self {
            CliError::Usage(_) | CliError::Ingest(_) | CliError::Output(_) => exit::INPUT,
            CliError::Model(e) => match e {
                E::Domain { .. }
                | E::InvalidParameter(_)
                | E::InvalidTable(_)
                | E::InsufficientSupport { .. }
                | E::IncomparableParameters => exit::INPUT,
                E::TruncationBudget { .. }
                | E::UnboundedQuantile { .. }
                | E::RatioRegression(_)
                | E::SingularDpcp { .. }
                | E::ZeroExpected { .. } => exit::NUMERICAL,
            },
            CliError::Encode(_) => exit::INTERNAL,
        }
    }
}
