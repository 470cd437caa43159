use thiserror::Error;

/// Broad classes used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input itself is unusable (parse errors, wrong shapes, bad indices).
    Input,
    /// The input is well formed but mathematically degenerate for the request.
    Degenerate,
    /// A numeric kernel failed to reach its tolerance.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("not smooth: {0}")]
    NotSmooth(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("no sections: {0}")]
    NoSections(String),

    #[error("condition (*) fails: {0}")]
    ConditionStar(String),

    #[error("non-transversal configuration ({0}); retry with different parameters")]
    NonTransversal(String),

    #[error("positive-dimensional or degenerate system: {0}")]
    PositiveDimensional(String),

    #[error("intersection count mismatch: expected {expected}, found {found}")]
    CountMismatch { expected: usize, found: usize },

    #[error("degenerate form or curve: {0}")]
    DegenerateForm(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Malformed(_) | Error::Dimension(_) => ErrorClass::Input,
            Error::NotSmooth(_)
            | Error::NoSections(_)
            | Error::ConditionStar(_)
            | Error::NonTransversal(_)
            | Error::PositiveDimensional(_)
            | Error::CountMismatch { .. }
            | Error::DegenerateForm(_) => ErrorClass::Degenerate,
            Error::Verification(_) | Error::Numeric(_) => ErrorClass::Numeric,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
