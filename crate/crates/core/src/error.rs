use thiserror::Error;

/// Errors raised by field, hyperfield and lifting operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid residue field: {0}")]
    InvalidResidueField(String),
    #[error("not an Eisenstein polynomial: {0}")]
    NotEisenstein(String),
    #[error("descriptor mismatch: {0}")]
    Mismatch(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("Hensel criterion not satisfied: {0}")]
    HenselCriterion(String),
    #[error("Newton iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("precision below lifting bound: need m > {required}, have m = {have}")]
    BelowBound { required: String, have: u32 },
    #[error("search budget exceeded: {needed} candidates, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    /// True for refusals caused by insufficient precision or length parameters.
    pub fn is_precision_refusal(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted(_) | Error::BelowBound { .. } | Error::HenselCriterion(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
