use thiserror::Error;

use crate::bayes::BayesError;
use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sensitivity diverges at working point {phi0}: the mean signal has zero slope")]
    DivergentSensitivity { phi0: f64 },
    #[error("outcome {outcome} is not valid for this measurement: {reason}")]
    InvalidOutcome { outcome: f64, reason: &'static str },
    #[error(transparent)]
    Bayes(#[from] BayesError),
}

impl From<NumericsError> for Error {
    fn from(e: NumericsError) -> Self {
        Error::Bayes(BayesError::Numerics(e))
    }
}

impl Error {
    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Bayes(BayesError::Numerics(_)) | Error::Bayes(BayesError::Indeterminate)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
