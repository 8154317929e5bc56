use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("fewer than two history entries on an axis")]
    InsufficientHistory,
    #[error("every record in the history window failed the SNR threshold")]
    AllFailed,
    #[error("no estimated beam satisfies the SNR threshold")]
    Infeasible,
    #[error("non-zero rate with zero power")]
    RateWithoutPower,
    #[error("malformed absorption table at line {line}: {reason}")]
    AbsorptionTable { line: usize, reason: String },
    #[error("malformed Q-table dump at line {line}: {reason}")]
    QTableFormat { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
