use thiserror::Error;

/// Unified error type. The CLI maps variants onto exit codes:
/// parameter/structure/input errors -> 2, budget violations -> 3,
/// oracle oversize -> 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Param(String),

    /// A structural precondition was violated (non-alternating augmentation,
    /// non-bipartite input to the bipartite matcher, ...). These indicate a
    /// bug in the caller, not bad user input, but are reported rather than
    /// panicking so the CLI can fail cleanly.
    #[error("structural error: {0}")]
    Structure(String),

    #[error("memory budget violated by {module}: stored {stored} edges, budget {budget}")]
    Budget {
        module: &'static str,
        stored: usize,
        budget: usize,
    },

    #[error("instance exceeds oracle budget: {0}")]
    Oversize(String),

    #[error("good-pair enumeration would exceed cap {cap} (estimated {estimate}); raise the cap or coarsen g")]
    EnumerationGuard { cap: u64, estimate: u64 },

    #[error("{path}: {msg}")]
    Input { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI. 0 is success and never produced here.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Param(_) | Error::Structure(_) | Error::Input { .. } => 2,
            Error::EnumerationGuard { .. } => 2,
            Error::Budget { .. } => 3,
            Error::Oversize(_) => 4,
            Error::Io(_) => 1,
        }
    }
}
