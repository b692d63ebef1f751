mod content;
mod fill;
mod lru;
mod oracle;

use thiserror::Error;

pub use content::{
    content_model, fill_step, ContentModelParams, ContentStep, DEFAULT_ACCESS_RATE,
    DEFAULT_FILE_SIZE, DEFAULT_RAMP_STEPS,
};
pub use fill::{fill_time, FillPoint};
pub use lru::{hit_rate_sweep, simulate_lru, Applied, CacheState, FileEntry, Outcome, SimResult};
pub use oracle::oracle_lru;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("cache capacity must be positive")]
    ZeroCapacity,
    #[error("no capacities given")]
    NoCapacities,
    #[error("invalid content model parameters: {0}")]
    InvalidParams(String),
}
