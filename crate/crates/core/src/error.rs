use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("arm {arm} out of range for {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("numerical failure at round {t}: {reason}")]
    Numerical { t: usize, reason: String },
}

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the user's input rather than the runtime.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::ArmOutOfRange { .. } | Error::Parse { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
