use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series log requires constant term 1, found {0}")]
    NonUnitConstantTerm(String),
    #[error("series exp requires constant term 0, found {0}")]
    NonZeroConstantTerm(String),
    #[error("polynomial-in-q output requires an exact profile; `{0}` is float-valued")]
    FloatProfileNotSupported(String),
    #[error(
        "mean value mismatch at q={q}, N={n}: coefficient formula gives {poly}, Euler product gives {euler}"
    )]
    MismatchDetected {
        q: u64,
        n: usize,
        poly: String,
        euler: String,
    },
    #[error("{0} is not prime; the enumeration oracle works over prime fields only")]
    NonPrimeModulus(u64),
    #[error("irreducible table up to degree {max_degree} cannot factor a degree-{needed} polynomial")]
    TableTooShallow { max_degree: usize, needed: usize },
    #[error("enumerating {needed} polynomials exceeds the work budget of {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("d_1 = {0} is outside the open interval (0, 1)")]
    D1OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
