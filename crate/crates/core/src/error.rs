use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{routine} did not converge: {detail}")]
    NonConvergence { routine: &'static str, detail: String },

    #[error("zero of the function on the contour boundary (min |h| = {min_modulus:e})")]
    BoundaryZero { min_modulus: f64 },

    #[error("evaluation outside the model domain: {0}")]
    Domain(String),

    #[error("evaluation at a pole: {0}")]
    PoleHit(String),

    #[error("root count mismatch: scan found {found}, argument principle gives {expected}; raise scan density to at least {suggested_scan}")]
    CountMismatch {
        found: usize,
        expected: i64,
        suggested_scan: usize,
    },

    #[error("sum rule violated: |Im sum| = {residual:e} exceeds {tolerance:e}")]
    SumRuleViolation { residual: f64, tolerance: f64 },

    #[error("|alpha G| reached {value:.3} on the imaginary axis; the logarithm leaves its principal branch")]
    StrongCoupling { value: f64 },

    #[error("geometry rejected: {0}")]
    Geometry(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonConvergence { .. } => "NonConvergence",
            Error::BoundaryZero { .. } => "BoundaryZero",
            Error::Domain(_) => "DomainError",
            Error::PoleHit(_) => "PoleHit",
            Error::CountMismatch { .. } => "CountMismatch",
            Error::SumRuleViolation { .. } => "SumRuleViolation",
            Error::StrongCoupling { .. } => "StrongCouplingError",
            Error::Geometry(_) => "GeometryError",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
