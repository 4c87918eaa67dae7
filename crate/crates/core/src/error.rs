use alloc::string::String;

/// Errors produced by the core operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("separation violated: points #{first} and #{second} are {distance:e} apart, below {required:e}")]
    SeparationViolation {
        first: usize,
        second: usize,
        distance: f64,
        required: f64,
    },

    #[error("input set is empty")]
    EmptyInput,

    #[error("grid steps differ: {left} vs {right}")]
    GridMismatch { left: f64, right: f64 },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    #[error("direction {theta} lies outside the admissible window of half-width {window}")]
    OutsideWindow { theta: f64, window: f64 },

    #[error("(delta,t) check failed for {what}: ratio {ratio} exceeds {threshold} (center ({cx}, {cy}), r = {radius})")]
    NonConcentration {
        what: String,
        ratio: f64,
        threshold: f64,
        cx: f64,
        cy: f64,
        radius: f64,
    },

    #[error("too few good balls ({found}); try a larger delta")]
    TooFewBalls { found: usize },

    #[error("infeasible request: {0}")]
    Infeasible(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
