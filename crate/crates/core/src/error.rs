use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library.
///
/// The variants are grouped into classes (see [`Error::class`]) which the
/// command-line front end maps onto distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("region {0} lies outside the image bounds")]
    Bounds(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {kind}")]
    Format { path: PathBuf, kind: FormatError },

    #[error("manifest {path}: {kind}")]
    Manifest { path: PathBuf, kind: ManifestError },
}

/// Parse failures for the binary raster and model formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("bad magic bytes {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("unsupported sample type tag {0}")]
    UnsupportedDtype(u32),
    #[error("truncated file: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("trailing data: expected {expected} bytes, found {found}")]
    TrailingBytes { expected: u64, found: u64 },
    #[error("declared dimensions overflow or are empty")]
    DimensionOverflow,
    #[error("invalid header field: {0}")]
    InvalidHeader(String),
    #[error("invalid sample value: {0}")]
    InvalidValue(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManifestError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("a stack needs at least 2 entries, found {0}")]
    TooFewEntries(usize),
    #[error("duplicate date label {0:?}")]
    DuplicateDate(String),
    #[error("referenced raster {0:?} does not exist")]
    MissingFile(PathBuf),
}

/// Coarse error classes, one per exit code of the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Io,
    Format,
    Dimension,
    Config,
    Manifest,
    MissingFile,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Dimension(_) | Error::DimensionMismatch { .. } | Error::Bounds(_) => {
                ErrorClass::Dimension
            }
            Error::Domain(_) | Error::Config(_) => ErrorClass::Config,
            Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => {
                ErrorClass::MissingFile
            }
            Error::Io { .. } => ErrorClass::Io,
            Error::Format { .. } => ErrorClass::Format,
            Error::Manifest {
                kind: ManifestError::MissingFile(_),
                ..
            } => ErrorClass::MissingFile,
            Error::Manifest { .. } => ErrorClass::Manifest,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
