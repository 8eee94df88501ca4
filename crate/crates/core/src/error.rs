use thiserror::Error;

use crate::estimators::Method;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("degenerate summary statistics: {0}")]
    DegenerateStats(&'static str),

    #[error("slope must be nonzero and finite (got {0})")]
    InvalidSlope(f64),

    #[error("horizontal regression is undefined when Sxy = 0")]
    HorizontalUndefined,

    #[error("slope sign is ambiguous when Sxy = 0")]
    SignAmbiguous,

    #[error("correlation is zero; the likelihood slope is undefined")]
    RhoZero,

    #[error("fourth-moment denominator is zero")]
    DenominatorZero,

    #[error("invalid error-variance ratio {0}")]
    InvalidKappa(f64),

    #[error("obliqueness parameter {0} is outside [0, 1]")]
    InvalidLambda(f64),

    #[error("slope {slope} lies outside the admissible interval [{lower}, {upper}]")]
    OutOfRange { slope: f64, lower: f64, upper: f64 },

    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("no closed-form error-variance row for {0:?}")]
    NoClosedForm(Method),

    #[error("invalid simulation config `{key}`: {reason}")]
    InvalidConfig { key: &'static str, reason: String },
}
