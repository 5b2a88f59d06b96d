use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: tautological clause (contains both {var} and -{var})")]
    TautologicalClause { line: usize, var: u32 },

    #[error("tautological clause (contains both {var} and -{var})")]
    Tautology { var: u32 },

    #[error("exact oracle refused: {vars} variables exceed the cap of {cap}")]
    CapExceeded { vars: usize, cap: usize },

    #[error("{what}: enumeration budget of {budget} exceeded")]
    BudgetExceeded { what: String, budget: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("formula is not in {bound}-CNF (found a clause of width {width})")]
    WidthExceeded { bound: usize, width: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn budget(what: impl Into<String>, budget: u64) -> Self {
        Error::BudgetExceeded { what: what.into(), budget }
    }

    /// True for cap and budget failures, which callers usually report separately.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
