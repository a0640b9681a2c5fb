use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A matrix contained NaN or infinite entries.
    InvalidMatrix,
    /// Smallest eigenvalue at or below the positive-definiteness tolerance.
    SingularMatrix { min_eigenvalue: f64 },
    DimensionMismatch { expected: usize, found: usize },
    /// The quadratic block of a lifted ellipsoid is not positive definite.
    SingularF { min_eigenvalue: f64 },
    /// The level-1 set of a lifted ellipsoid has empty interior.
    EmptyEllipsoid { delta: f64 },
    /// One of the reduced training sets is empty.
    DegenerateModel,
    EmptyClass,
    InvalidHyperparams(&'static str),
    InvalidArgument(&'static str),
    LengthMismatch { left: usize, right: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMatrix => write!(f, "matrix has non-finite entries"),
            Error::SingularMatrix { min_eigenvalue } => {
                write!(f, "matrix is singular (smallest eigenvalue {min_eigenvalue:e})")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::SingularF { min_eigenvalue } => write!(
                f,
                "quadratic block is not positive definite (smallest eigenvalue {min_eigenvalue:e})"
            ),
            Error::EmptyEllipsoid { delta } => {
                write!(f, "ellipsoid is empty (lifting offset {delta} >= 1)")
            }
            Error::DegenerateModel => write!(f, "model is degenerate: a reduced training set is empty"),
            Error::EmptyClass => write!(f, "both classes need at least one point"),
            Error::InvalidHyperparams(msg) => write!(f, "invalid hyperparameters: {msg}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
        }
    }
}

impl core::error::Error for Error {}
