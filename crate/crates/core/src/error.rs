use std::fmt;

use thiserror::Error;

/// One violated well-formedness condition of a candidate automaton.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ValidationError {
    AlphabetOverlap(String),
    DanglingState(String),
    UndeclaredLabel(String),
    InvalidIdentifier(String),
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::AlphabetOverlap(n) => {
                write!(f, "`{n}` is declared both as input and as output")
            }
            ValidationError::DanglingState(n) => write!(f, "initial state `{n}` is not declared"),
            ValidationError::UndeclaredLabel(n) => {
                write!(f, "label `{n}` is neither an input nor an output")
            }
            ValidationError::InvalidIdentifier(n) => write!(f, "`{n}` is not a valid identifier"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid automaton: {}", join(.0))]
    Invalid(Vec<ValidationError>),
    #[error("label `{0}` is not in the alphabet")]
    ForeignLabel(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("quiescence label `{0}` already occurs in the alphabet")]
    DeltaNameClash(String),
    #[error("not input-enabled: state `{state}` refuses input `{input}`")]
    NotInputEnabled { state: String, input: String },
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `initial` declaration")]
    MissingInitial,
    #[error("line {line}: duplicate `initial` declaration")]
    DuplicateInitial { line: usize },
    #[error("line {line}: undeclared label `{label}`")]
    UndeclaredLabel { line: usize, label: String },
    #[error("line {line}: `{name}` declared both as input and as output")]
    AlphabetOverlap { line: usize, name: String },
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// Variant name, used as a stable tag in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Invalid(_) => "Invalid",
            Error::ForeignLabel(_) => "ForeignLabel",
            Error::AlphabetMismatch(_) => "AlphabetMismatch",
            Error::DeltaNameClash(_) => "DeltaNameClash",
            Error::NotInputEnabled { .. } => "NotInputEnabled",
            Error::Syntax { .. } => "Syntax",
            Error::MissingInitial => "MissingInitial",
            Error::DuplicateInitial { .. } => "DuplicateInitial",
            Error::UndeclaredLabel { .. } => "UndeclaredLabel",
            Error::AlphabetOverlap { .. } => "AlphabetOverlap",
            Error::Internal(_) => "Internal",
        }
    }
}

fn join(errs: &[ValidationError]) -> String {
    errs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
