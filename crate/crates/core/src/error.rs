use thiserror::Error;

use crate::structure::Elem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what}: size {size} exceeds limit {limit}")]
    LimitExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` has arity {expected}, used with {found} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("element {0} is not in the universe")]
    NotInUniverse(Elem),
    #[error("vertex {0} is out of range")]
    NoSuchVertex(usize),
    #[error("constant `{0}` has conflicting interpretations")]
    ConstantConflict(String),
    #[error("operation undefined for vocabularies with constants")]
    ConstantsPresent,
    #[error("invalid vocabulary: {0}")]
    Vocabulary(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("formula is not first-order: {0}")]
    NotFirstOrder(String),
    #[error("modulator sentence declared treewidth {declared} but accepted modulator {modulator:?} gives treewidth {actual}")]
    DeclaredTreewidthViolated {
        declared: usize,
        actual: usize,
        modulator: Vec<Elem>,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
