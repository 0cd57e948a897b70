use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("admissibility error: {0}")]
    Admissibility(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("degenerate solution: {0}")]
    Degenerate(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Geometry(_) => "geometry",
            Error::Config(_) => "config",
            Error::Numerical(_) => "numerical",
            Error::Resolution(_) => "resolution",
            Error::Admissibility(_) => "admissibility",
            Error::Unsupported(_) => "unsupported",
            Error::Degenerate(_) => "degenerate",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Unsupported(_) | Error::Admissibility(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
