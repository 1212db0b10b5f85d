use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("scenario mismatch: {left} vs {right}")]
    ScenarioMismatch { left: String, right: String },

    #[error("expected {expected} entries, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("enumeration of {count} deterministic strategies exceeds the limit of {limit}")]
    EnumerationTooLarge { count: u128, limit: u64 },

    #[error("operation requires the {required} scenario")]
    UnsupportedScenario { required: &'static str },

    #[error("table parse error at line {line}: {message}")]
    Table { line: usize, message: String },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),

    #[error("invalid realization: {0}")]
    InvalidRealization(String),

    #[error("context out of range: {0}")]
    ContextOutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),
}
