use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Invalid {
        context: String,
        source: arl_core::Error,
    },

    #[error(transparent)]
    Core(#[from] arl_core::Error),
}

impl CliError {
    /// 2 for bad input, 3 when the tower is not AR-l-adic, 4 for a finite index.
    pub fn exit_code(&self) -> u8 {
        use arl_core::Error as E;
        let core = match self {
            CliError::Invalid { source, .. } => source,
            CliError::Core(e) => e,
            _ => return 2,
        };
        match core {
            E::NotArLAdic { .. } | E::NotLAdic { .. } | E::NonStabilizing { .. } => 3,
            E::FiniteIndex { .. } => 4,
            _ => 2,
        }
    }
}
