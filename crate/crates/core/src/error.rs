use thiserror::Error;

/// Errors raised by the symbolic engine.
///
/// Precondition failures carry enough context to be shown to a CLI user
/// as-is; `Inconsistent` marks a violated internal cross-check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different ring presentations")]
    RingMismatch,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid ring presentation: {0}")]
    InvalidPresentation(String),
    #[error("class is not a unit: constant term is {0}, expected 1")]
    NotUnit(String),
    #[error("degree {degree} is outside 0..={truncation}")]
    DegreeOutOfRange { degree: i64, truncation: u32 },
    #[error("bundle `{0}` has no Chern data")]
    MissingChernData(String),
    #[error("bundle `{name}` has rank {rank}, expected {expected}")]
    RankMismatch {
        name: String,
        rank: u32,
        expected: u32,
    },
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("missing base data: {0}")]
    MissingBase(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("syntax error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
