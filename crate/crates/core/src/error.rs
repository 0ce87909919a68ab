use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension mismatch: {0}")]
    Mismatch(String),
    #[error("wrong degree: expected {expected}, found {found}")]
    Degree { expected: i32, found: i32 },
    #[error("not a Maurer-Cartan element: curvature {0}")]
    NotMaurerCartan(String),
    #[error("element is not in the image of the homotopy")]
    NotInImage,
    #[error("identity check failed: {0}")]
    Check(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn mismatch(msg: impl Into<String>) -> Self {
        Error::Mismatch(msg.into())
    }

    pub fn check(msg: impl Into<String>) -> Self {
        Error::Check(msg.into())
    }

    /// Stable identifier used in machine-readable reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Invalid(_) => "invalid",
            Error::Mismatch(_) => "mismatch",
            Error::Degree { .. } => "degree",
            Error::NotMaurerCartan(_) => "not-mc",
            Error::NotInImage => "not-in-image",
            Error::Check(_) => "check-failed",
            Error::Budget(_) => "budget",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
