use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BellError {
    #[error("photon number {requested} exceeds the supported maximum {max}")]
    Range { requested: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "truncation mass {reached:.6} at N = {cap} is below the threshold {threshold}; \
         gain too high for the configured cap"
    )]
    CapExceeded {
        threshold: f64,
        cap: usize,
        reached: f64,
    },

    #[error("enumeration of {strategies} strategies exceeds the budget (L <= {max_settings}, cap <= {max_cap})")]
    BudgetExceeded {
        strategies: u128,
        max_settings: usize,
        max_cap: u32,
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

impl BellError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        BellError::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, BellError>;
