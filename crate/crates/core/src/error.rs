use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("group elements come from different backends ({left} vs {right})")]
    BackendMismatch { left: String, right: String },

    #[error("level {level} out of range (built depth {depth})")]
    LevelOutOfRange { level: usize, depth: usize },

    #[error(
        "transversal for level {level} incomplete: {missing} classes missing after search radius {radius}"
    )]
    TransversalIncomplete {
        level: usize,
        missing: u64,
        radius: u32,
    },

    /// The element is not periodized by any level of the built tower.
    #[error("element {element} not resolved at built depth {built_depth}; needs depth >= {required_at_least}")]
    DepthExceeded {
        element: String,
        built_depth: usize,
        required_at_least: usize,
    },

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
