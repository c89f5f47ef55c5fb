use thiserror::Error;

use crate::graded_poly::TriDegree;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("cannot multiply two factors that both carry bracket atoms")]
    BracketProduct,

    #[error("half-integer t-degree at {0}")]
    HalfIntegerT(TriDegree),

    #[error("bracket [N{offset:+}] has negative length at N = {n}")]
    NegativeBracket { offset: i64, n: i64 },

    #[error("expected an atom-free polynomial")]
    NotAtomFree,

    #[error("polynomial has a negative coefficient at {0}")]
    Negative(TriDegree),

    #[error("record `{0}` already defined")]
    DuplicateName(String),

    #[error("no record named `{0}`")]
    UnknownRecord(String),

    #[error("record `{name}` has kind {found}, expected {expected}")]
    WrongKind { name: String, expected: String, found: String },

    #[error("invalid record: {0}")]
    Record(String),

    #[error("`{0}` is not divisible by the cone factor")]
    NotDivisible(String),

    #[error("search space too large ({0} candidates)")]
    SearchTooLarge(u128),

    #[error("stage `{stage}` does not match `{expected}`: {diff}")]
    StageMismatch { stage: String, expected: String, diff: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
