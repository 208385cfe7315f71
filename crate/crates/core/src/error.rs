use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("universe mismatch: {left} vs {right} elements")]
    UniverseMismatch { left: usize, right: usize },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("{capability} is not supported by the {domain} domain")]
    Unsupported {
        capability: &'static str,
        domain: &'static str,
    },

    /// A desk-scale limit was exceeded (universe width, enumeration size, DP vertex cap).
    #[error("guard exceeded: {0}")]
    Guard(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn guard(msg: impl Into<String>) -> Self {
        Error::Guard(msg.into())
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Guard(_) | Error::Unsupported { .. } => 3,
            _ => 2,
        }
    }
}
