use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

/// A malformed model. Every variant names the definition or macro in which
/// the offending expression appears.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{context}: undeclared name `{name}`")]
    UndeclaredName { context: String, name: String },
    #[error("{context}: `{name}` declared more than once")]
    DuplicateName { context: String, name: String },
    #[error("{context}: index {index} out of range for `{name}`")]
    IndexOutOfRange { context: String, name: String, index: usize },
    #[error("{context}: type mismatch in `{expr}`: {detail}")]
    TypeMismatch { context: String, expr: String, detail: String },
    #[error("{context}: value {value} is outside the declared universe of set `{set}`")]
    OutsideUniverse { context: String, set: String, value: String },
    #[error("{context}: call to `{name}` with {got} arguments, expected {expected}")]
    Arity { context: String, name: String, expected: usize, got: usize },
    #[error("{context}: empty domain in indexed choice")]
    EmptyDomain { context: String },
    #[error("{context}: unguarded recursion")]
    UnguardedRecursion { context: String },
    #[error("{context}: {detail}")]
    Invalid { context: String, detail: String },
}
