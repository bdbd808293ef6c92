use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Coarse failure category. Callers map these onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A parameter or configuration value violates a precondition.
    InvalidConfig,
    /// Input data is malformed, empty or inconsistent in shape.
    Data,
    /// A computation produced a non-finite value or a singular system.
    Numerical,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidParameter(String),
    DimensionMismatch { what: &'static str, expected: usize, actual: usize },
    EmptyInput(&'static str),
    AllRowsDropped { rows: usize },
    EmptyPartition { rows: usize, train_fraction: f64 },
    SingleClass,
    UntrainedModel,
    NonFiniteLoss { epoch: usize },
    SingularSystem { dim: usize },
    EnumerationCap { features: usize, cap: usize },
    IndexOutOfRange { index: usize, len: usize },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_) | Error::EnumerationCap { .. } => ErrorKind::InvalidConfig,
            Error::NonFiniteLoss { .. } | Error::SingularSystem { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Data,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::DimensionMismatch { what, expected, actual } => {
                write!(f, "dimension mismatch in {what}: expected {expected}, got {actual}")
            }
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::AllRowsDropped { rows } => {
                write!(f, "all {rows} rows contain non-finite values; nothing left to use")
            }
            Error::EmptyPartition { rows, train_fraction } => write!(
                f,
                "train fraction {train_fraction} of {rows} rows leaves an empty partition"
            ),
            Error::SingleClass => write!(f, "labels must contain both classes (0 and 1)"),
            Error::UntrainedModel => write!(f, "model has not been trained"),
            Error::NonFiniteLoss { epoch } => write!(f, "non-finite loss encountered in epoch {epoch}"),
            Error::SingularSystem { dim } => {
                write!(f, "kernel regression system of size {dim} is singular")
            }
            Error::EnumerationCap { features, cap } => write!(
                f,
                "exact enumeration over {features} features exceeds the cap of {cap}"
            ),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "feature index {index} out of range for {len} columns")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
