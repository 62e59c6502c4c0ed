use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown subgroup `{0}`")]
    UnknownSubgroup(String),
    #[error("subgroup letter @{0}(...) evaluates to the identity")]
    IdentitySubLetter(String),
    #[error("letter does not belong to this group's alphabet: {0}")]
    ForeignLetter(String),
    #[error("invalid group configuration: {0}")]
    Config(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("X-ball of radius {radius} exceeds the vertex cap {cap}")]
    VertexCap { radius: usize, cap: usize },
    #[error("element {0} lies outside the truncation radius {1}")]
    OutsideTruncation(String, usize),
    #[error("exact relative distance unavailable: {0}")]
    ExactnessUnavailable(String),
    #[error("the generating set X is empty")]
    EmptyGeneratingSet,
    #[error("invalid caps: {0}")]
    InvalidCaps(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
