use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("optimizer produced a non-finite risk or gradient at iterate {iterate:?}")]
    NonFiniteIterate { iterate: Vec<f64> },

    #[error(
        "initial prior exhausted after {restarts} restarts at outer iteration {iteration} \
         (next initial prior {next_initial_prior} <= xi {xi})"
    )]
    InitialPriorExhausted {
        restarts: usize,
        iteration: usize,
        next_initial_prior: f64,
        xi: f64,
    },

    #[error("insufficient pool: need {needed} {class} examples, have {available}")]
    InsufficientPool {
        class: &'static str,
        needed: usize,
        available: usize,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("population iteration violated monotonicity at step {step}: {prev} -> {next}")]
    NonMonotone { step: usize, prev: f64, next: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
