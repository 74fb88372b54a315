//! Solver implementations and their parameter selectors.

mod common;
mod gd;
mod params;
mod saga;
mod sampling;
mod sarah;
mod sdca;
mod svrg;

pub use common::{NoopObserver, SolveObserver};

use crate::error::Result;
use crate::problem::SamplingDistribution;
use rand_chacha::ChaCha8Rng;

pub(crate) fn sampler_for(dist: &SamplingDistribution) -> Result<sampling::IndexSampler> {
    sampling::IndexSampler::new(dist)
}

/// Inner-loop trip count for one geometric epoch of expected length `m`.
pub(crate) fn geometric_trips(m: f64, rng: &mut ChaCha8Rng) -> u64 {
    sampling::sample_geometric_failures(m, rng) + 1
}

pub use gd::{gradient_descent, gradient_descent_observed, GdConfig};
pub use params::{
    nonconvex_svrg_params, optimal_rate_bound, optimal_svrg_params, svrg_rate_bound,
    NonconvexParams,
};
pub use saga::{saga, saga_observed, SagaConfig};
pub use sarah::{sarah, sarah_observed};
pub use sdca::{sdca, sdca_coordinate_step, sdca_with, DualState, SdcaConfig, SdcaRun};
pub use svrg::{prox_svrg, prox_svrg_observed, EpochMode, SvrgConfig};
