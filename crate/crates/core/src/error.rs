use thiserror::Error;

use crate::exergy::ExergyError;
use crate::fuel::FuelError;
use crate::gasifier::GasifierError;
use crate::thermo::ThermoError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Fuel(#[from] FuelError),
    #[error(transparent)]
    Gasifier(#[from] GasifierError),
    #[error(transparent)]
    Exergy(#[from] ExergyError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("all {0} sweep points failed")]
    AllPointsFailed(usize),
    #[error("no results to write")]
    EmptyResults,
    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Process exit code: 2 for bad input, 3 for solver failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Gasifier(
                GasifierError::NonConvergence { .. } | GasifierError::Unconverged(_),
            )
            | Error::AllPointsFailed(_) => 3,
            Error::Exergy(ExergyError::NegativeDestruction { .. }) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
