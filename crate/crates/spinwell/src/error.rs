use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("{origin}:{line}: unknown key `{key}`")]
    UnknownKey {
        origin: String,
        line: usize,
        key: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("not a snapshot file (bad magic)")]
    BadMagic,
    #[error("unsupported snapshot version {0}")]
    UnsupportedVersion(u32),
    #[error("snapshot truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("snapshot has {found} trailing bytes")]
    TrailingBytes { found: usize },
    #[error("snapshot dimensions {found:?} do not match the configured bases {expected:?}")]
    DimensionMismatch { expected: [u32; 6], found: [u32; 6] },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error(transparent)]
    Core(#[from] spinwell_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{failed} of {total} ensemble paths failed")]
    PathsFailed { failed: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for configuration and setup problems, 3 for
    /// numerical aborts. Tolerance failures are not errors and exit with 1.
    pub fn exit_code(&self) -> i32 {
        use spinwell_core::Error as E;
        match self {
            Error::Core(E::NonFinite { .. } | E::BlowUp { .. }) | Error::PathsFailed { .. } => 3,
            _ => 2,
        }
    }
}
