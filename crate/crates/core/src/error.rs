use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix of size {size} exceeds the cap of {cap}")]
    TooLarge { size: usize, cap: usize },

    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("walk step count must be even and >= 2, got {0}")]
    OddSteps(usize),

    #[error("probability mass {mass:e} on node {node}, which touches no simplex of this order")]
    MassOnIsolated { node: usize, mass: f64 },

    #[error("empty mask")]
    EmptyMask,

    #[error("input has zero variance; rank correlation is undefined")]
    ConstantInput,

    #[error("relative density undefined: original complex has no simplices of order {0}")]
    UndefinedDensity(usize),

    #[error("no valid rewiring found after {attempts} attempts{}", achieved_note(.achieved))]
    Saturated { attempts: usize, achieved: Option<f64> },

    #[error("64-bit color digest collision between distinct signatures")]
    HashCollision,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, msg: msg.into() }
    }
}

fn achieved_note(achieved: &Option<f64>) -> String {
    achieved.map(|a| format!(" (achieved rho_2 = {a})")).unwrap_or_default()
}
