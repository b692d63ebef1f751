mod histogram;
mod lifetimes;
mod powerlaw;
mod reads;

use thiserror::Error;

pub use histogram::{build_histogram, Histogram};
pub use lifetimes::{
    lifetime_quantile_report, mean_lifetime_hours, segment_lifetimes, threshold_sweep,
    LifetimeRecord, Segmentation, SweepPoint, ThresholdSweep, DEFAULT_TAU_SECS,
};
pub use powerlaw::{
    fit_power_law, initial_guess, sum_squared_residuals, PowerLawFit, MAX_ITERATIONS,
    REL_TOLERANCE,
};
pub use reads::{
    count_reads_per_file, read_size_stats, transfer_totals, ReadStats, TransferStats,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("empty input")]
    EmptyInput,
    #[error("invalid bins: {0}")]
    InvalidBins(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("fit did not converge after {} iterations", best.iterations)]
    NonConvergence { best: PowerLawFit },
}
