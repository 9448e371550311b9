use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{0}` does not belong to this group's alphabet")]
    ForeignSymbol(String),
    #[error("subgroups live in different ambient groups")]
    AmbientMismatch,
    #[error("the provided generators are not a free basis")]
    NotAFreeBasis,
    #[error("word is not a member of the morphism's domain")]
    NotAMember,
    #[error("membership could not be decided: {0}")]
    UnsupportedMembership(String),
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("presentation requires finitely generated associated subgroups")]
    NotFinitelyGenerated,
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
