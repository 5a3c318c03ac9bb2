use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown example `{0}` (run `list` to see the registry)")]
    UnknownExample(String),

    #[error("invalid order list: {0}")]
    InvalidOrders(String),

    #[error("interior sampling exhausted {draws} draws with {found} of {wanted} points accepted")]
    SamplingBudget { draws: u64, found: usize, wanted: usize },

    #[error("reference solution at m = {m} failed: {source}")]
    Reference {
        m: usize,
        #[source]
        source: nystrom_core::Error,
    },

    #[error(transparent)]
    Solver(#[from] nystrom_core::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed table: {0}")]
    Table(String),
}

pub type Result<T> = std::result::Result<T, BenchError>;
