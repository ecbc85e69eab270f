use thiserror::Error;

/// Errors produced by the illumination toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QiError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite (leading minor {index} = {value:.3e})")]
    NotPositiveDefinite { index: usize, value: f64 },

    #[error("state is not a bona fide quantum state (smallest symplectic eigenvalue {0:.12})")]
    Unphysical(f64),

    #[error("correlation {c} exceeds the physical maximum {max}")]
    CorrelationTooLarge { c: f64, max: f64 },

    #[error("symplectic pairing failed: {0}")]
    Pairing(String),

    #[error("analytic form out of domain: {0}")]
    AnalyticDomain(String),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("Fock dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("truncation tail bound {bound:.3e} exceeds the budget {budget:.3e}")]
    TruncationBudget { bound: f64, budget: f64 },

    #[error("operator has eigenvalue {0:.3e} below the negativity floor")]
    NegativeEigenvalue(f64),

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
}

pub type Result<T, E = QiError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> QiError {
    QiError::InvalidInput(msg.into())
}
