use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown wavelet `{0}` (expected haar, daubechies-2, daubechies-3, coiflet-1 or pollen:<a>,<b>)")]
    UnknownWavelet(String),

    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("decomposition depth {depth} is too large for a signal of {len} samples (max {max})")]
    DepthTooLarge { depth: usize, len: usize, max: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("reference signal has zero energy")]
    ZeroEnergy,

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("{}", ParseLocation(.path, *.line, *.column, .message))]
    Parse {
        path: PathBuf,
        line: usize,
        column: Option<usize>,
        message: String,
    },

    #[error("manifest: {0}")]
    Manifest(String),

    #[error("missing recording files: {}", join_paths(.0))]
    MissingFiles(Vec<PathBuf>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

struct ParseLocation<'a>(&'a PathBuf, usize, Option<usize>, &'a String);

impl fmt::Display for ParseLocation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ParseLocation(path, line, column, message) = self;
        match column {
            Some(col) => write!(f, "{}:{line}:{col}: {message}", path.display()),
            None => write!(f, "{}:{line}: {message}", path.display()),
        }
    }
}

fn join_paths(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| p.display().to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
