use thiserror::Error;

/// Errors raised by the arithmetic and enumeration layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live over different fields")]
    SpecMismatch,
    #[error("{0} is not a prime characteristic")]
    InvalidCharacteristic(u64),
    #[error("invalid field description: {0}")]
    InvalidField(String),
    #[error("series is not a unit (constant term is zero)")]
    NonUnit,
    #[error("enumeration of {needed} elements exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("insufficient precision: need {needed}, have {available}")]
    InsufficientPrecision { needed: usize, available: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("no overlapping known u-window to compare")]
    WindowEmpty,
    #[error("inverse of an exact non-monomial needs an explicit precision")]
    UnboundedInverse,
    #[error("order {0} is not of the form unit * q^E")]
    MalformedOrder(String),
    #[error("torsion level segment violated for p={p}, n={n}, k={k}: level {missing} unreachable below {m}")]
    SegmentViolation {
        p: u64,
        n: u64,
        k: u64,
        m: u64,
        missing: u64,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
