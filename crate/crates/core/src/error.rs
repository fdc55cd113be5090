use thiserror::Error;

/// Errors raised by the numeric layers of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument {value} is outside the domain ({requirement})")]
    Domain {
        function: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series did not reach its truncation tolerance within {max_terms} terms")]
    TruncationBudget { max_terms: u64 },

    #[error("no finite quantile at level {q} for an unbounded support")]
    UnboundedQuantile { q: f64 },

    #[error("ratio regression needs observations at value {value}")]
    InsufficientSupport { value: u64 },

    #[error("ratio regression failed: {0}")]
    RatioRegression(&'static str),

    #[error("invalid frequency table: {0}")]
    InvalidTable(String),

    #[error("parameter records must share r and differ in at most one of nu or p")]
    IncomparableParameters,

    #[error(
        "P(X = 0) underflows (ln P0 = {log_p0}); compound-Poisson parametrization is singular"
    )]
    SingularDpcp { log_p0: f64 },

    #[error("expected frequency of class {class} is zero")]
    ZeroExpected { class: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
