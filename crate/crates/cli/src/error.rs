use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or parameters.
    #[error("usage: {0}")]
    Usage(String),
    /// The analysis ran and its check failed.
    #[error("analysis failed: {0}")]
    Analysis(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Analysis(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<ifs_shadow::Error> for CliError {
    fn from(e: ifs_shadow::Error) -> Self {
        use ifs_shadow::Error as E;
        match &e {
            E::Io(_) => CliError::Io(e.to_string()),
            E::Csv(c) if c.is_io_error() => CliError::Io(e.to_string()),
            E::NotAveragePseudoOrbit { .. }
            | E::MissingRatio(_)
            | E::BudgetExceeded { .. }
            | E::PreimageUnavailable { .. }
            | E::RoundTrip { .. }
            | E::NoDistinctSamples(_) => CliError::Analysis(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
