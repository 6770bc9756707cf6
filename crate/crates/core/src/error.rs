use thiserror::Error;

/// Errors raised by the library.
///
/// The variants split into two families: input problems (configuration,
/// domain, validation, precondition) and numeric failures. The CLI maps the
/// first family to exit code 2 and the second to exit code 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("undefined result: {0}")]
    Undefined(String),

    #[error("numeric error at x = {location}: {message}")]
    Numeric { location: f64, message: String },

    #[error("estimation did not converge: {0}")]
    Estimation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Domain(_)
                | Error::Validation(_)
                | Error::Precondition(_)
                | Error::Undefined(_)
                | Error::Io(_)
        )
    }

    pub(crate) fn numeric(location: f64, message: impl Into<String>) -> Self {
        Error::Numeric { location, message: message.into() }
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

pub type Result<T, E = Error> = std::result::Result<T, E>;
