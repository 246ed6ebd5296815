use thiserror::Error;

use crate::dataset::Class;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input contains no records")]
    EmptyInput,

    #[error("line {line}: malformed score {value:?}")]
    MalformedScore { line: u64, value: String },

    #[error("line {line}: label {label:?} is not covered by the label mapping")]
    UnmappedLabel { line: u64, label: String },

    #[error("line {line}: expected 2 columns `score,label`, found {found}")]
    MalformedRecord { line: u64, found: usize },

    #[error("non-finite score {0}")]
    NonFiniteScore(f64),

    #[error("class {0} has no samples")]
    EmptyClass(Class),

    #[error("operation needs samples of both classes (n0 = {n0}, n1 = {n1})")]
    SingleClass { n0: usize, n1: usize },

    #[error("score {0} lies outside [0, 1]; probabilistic operations need probability scores")]
    ScoreOutOfRange(f64),

    #[error("operating condition {0} lies outside [0, 1]")]
    ConditionOutOfRange(f64),

    #[error("condition is undefined: cost proportion {c} with class proportion {pi}")]
    UndefinedCondition { c: f64, pi: f64 },

    #[error("operation expects a {expected} ROC curve")]
    WrongCurveKind { expected: &'static str },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("density integrates to {integral}, expected 1 within 1e-6")]
    DensityNotNormalized { integral: f64 },

    #[error("invalid density table: {0}")]
    InvalidDensity(String),

    #[error("need at least {min} samples, got {n}")]
    TooFewSamples { n: usize, min: usize },

    #[error("unknown fixture {0:?} (expected fig1, fig2, fig6 or fig7)")]
    UnknownFixture(String),

    #[error("unknown threshold method {0:?}")]
    UnknownMethod(String),

    #[error("method {0} does not produce a single cost line")]
    NotAFixedMethod(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
}

impl Error {
    /// Errors caused by unreadable or malformed input, as opposed to a
    /// well-formed input that violates an operation's precondition.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::EmptyInput
                | Error::MalformedScore { .. }
                | Error::UnmappedLabel { .. }
                | Error::MalformedRecord { .. }
                | Error::NonFiniteScore(_)
                | Error::InvalidDensity(_)
                | Error::DensityNotNormalized { .. }
                | Error::Io(_)
                | Error::Csv { .. }
        )
    }
}
