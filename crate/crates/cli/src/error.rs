use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::Numeric(_) | CliError::Io(_) | CliError::Csv(_) => 4,
        }
    }
}

impl From<mg1tail_core::Error> for CliError {
    fn from(e: mg1tail_core::Error) -> Self {
        use mg1tail_core::Error as E;
        match e {
            E::InvalidParameter { .. } | E::Domain { .. } | E::UnsupportedMoment { .. } | E::Config(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}
