use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed structure: {0}")]
    Structure(String),

    #[error("slot mismatch: {0}")]
    SlotMismatch(String),

    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("budget exceeded: {what} needs {needed}, limit {limit}")]
    Budget { what: String, needed: usize, limit: usize },

    #[error("component of {cell} is not invertible at {at}")]
    NotInvertible { cell: String, at: String },

    #[error("{src} and {dst} differ at {at}; the canonical comparison is not an identity")]
    NotCanonical { src: String, dst: String, at: String },

    #[error("source of {0} is not an iterated strengthening")]
    NotExtension(String),

    #[error("unknown {kind}: {name}")]
    Unknown { kind: &'static str, name: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
