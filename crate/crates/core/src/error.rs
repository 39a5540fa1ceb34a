use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite input at coordinate {index}: {value}")]
    NonFiniteInput { index: usize, value: f64 },

    #[error("non-finite fitness {value} for particle {particle} in iteration {iteration}")]
    NumericFailure {
        particle: usize,
        iteration: usize,
        value: f64,
    },

    #[error("particle index {index} out of range for a swarm of {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by invalid user input (including malformed plan
    /// files) rather than by the optimization itself or the filesystem.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::NonFiniteInput { .. }
                | Error::IndexOutOfRange { .. }
                | Error::Json { .. }
        )
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NumericFailure { .. })
    }
}
