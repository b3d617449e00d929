use thiserror::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_GATE_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{failed} of {total} replicas failed ({reason}); budget is {budget}")]
    FailureBudget {
        failed: usize,
        total: usize,
        budget: f64,
        reason: String,
    },

    #[error(transparent)]
    Core(#[from] rmtlab_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("output error: {0}")]
    Output(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        use rmtlab_core::Error as E;
        match self {
            Self::Config(_) | Self::Io(_) | Self::Output(_) => EXIT_CONFIG,
            Self::Core(E::InvalidParameter(_) | E::Unsupported(_) | E::SizeLimit(_) | E::DimensionMismatch(_)) => {
                EXIT_CONFIG
            }
            Self::FailureBudget { .. } | Self::Core(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        Self::Output(e.to_string())
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        Self::Output(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
