use thiserror::Error;

/// Default cap on the number of multisets enumerated by certification.
pub const MULTISET_BUDGET: u64 = 100_000_000;
/// Default cap on ordered s-blocks enumerated by the Σ counter.
pub const BLOCK_BUDGET: u64 = 10_000_000;
/// Default cap on brute-force tuple enumeration for linear systems.
pub const TUPLE_BUDGET: u64 = 10_000_000;
/// Default cap on quadruples visited by the brute-force incidence counter.
pub const INCIDENCE_BUDGET: u64 = 100_000_000;
/// Default cap on path extensions performed by the cycle search.
pub const CYCLE_BUDGET: u64 = 10_000_000;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The input is outside the mathematical domain of the operation
    /// (zero in multiplicative mode, empty set where a maximum is needed, a pole).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded in {what}: needs {required}, budget is {budget}")]
    Capacity {
        what: &'static str,
        required: String,
        budget: u64,
    },

    /// Construction or operation parameters outside the supported regime.
    #[error("parameter error: {0}")]
    Parameter(String),
}

impl Error {
    pub(crate) fn capacity(what: &'static str, required: impl ToString, budget: u64) -> Self {
        Error::Capacity {
            what,
            required: required.to_string(),
            budget,
        }
    }
}
