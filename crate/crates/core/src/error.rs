use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A Möbius coefficient quadruple with vanishing determinant.
    #[error("degenerate branch: determinant {0:e} is zero")]
    Degenerate(f64),
    /// A generalized circle with |b|² − ad ≤ 0.
    #[error("degenerate circle: |b|^2 - ad = {0:e} is not positive")]
    DegenerateCircle(f64),
    /// Two circles with the same locus were asked to intersect.
    #[error("identical loci cannot be intersected")]
    IdenticalLoci,
    /// A stratum or word enumeration exceeded its budget.
    #[error("truncated at level {level}: {count} items exceed the budget of {budget}")]
    Truncated { level: usize, count: usize, budget: usize },
    /// A scene or partition violates one of its invariants.
    #[error("validation error ({invariant}): {detail}")]
    Validation { invariant: &'static str, detail: String },
    /// A point set that must be nonempty was empty.
    #[error("empty input")]
    EmptyInput,
    /// Scene text could not be parsed.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    /// Unknown gallery name.
    #[error("unknown gallery scene {name:?}; available: {}", available.join(", "))]
    UnknownScene { name: String, available: Vec<String> },
    /// A connectivity count that could not be resolved in any chart.
    #[error("connectivity unresolved: component touches the viewport edge in every chart")]
    Unresolved,
    /// Filesystem failure.
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn validation(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation { invariant, detail: detail.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
