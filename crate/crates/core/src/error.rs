use thiserror::Error;

/// Errors raised by the solvers.
///
/// The variants map onto the CLI exit codes: [`Error::Domain`] and
/// [`Error::Divergence`] are input problems, everything else is a solver
/// failure.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("divergence: {0}")]
    Divergence(String),
    #[error("evaluation on the kernel diagonal at u = v = {0}")]
    Diagonal(f64),
    #[error("ill-posed system: {0}")]
    IllPosed(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by invalid inputs rather than numerical failure.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Divergence(_) | Error::Diagonal(_) | Error::Unsupported(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Returns a domain error unless `cond` holds. Written as `!(cond)` so that
/// NaN inputs fail the check.
macro_rules! ensure_domain {
    ($cond:expr, $($arg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !($cond) {
            return Err($crate::error::Error::Domain(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure_domain;
