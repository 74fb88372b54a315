//! Experiment drivers, rate estimation, and independent test oracles.

mod experiment;
pub mod oracles;
mod rate;
mod support;

pub use experiment::{
    complexity_to_eps, reference_solve, speedup_experiment, ReferenceSolution, SpeedupRow,
};
pub use oracles::{sdca_enumerated_mean, sdca_expectation_operator, sdca_expectation_step};
pub use rate::{
    default_window, estimate_rate, estimate_rate_series, mean_dist_sq_by_epoch,
    mean_suboptimality_by_epoch, RateEstimate,
};
pub use support::BlockSupportTracker;
