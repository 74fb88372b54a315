//! Shared instance builders for the solver benchmarks.

use spanbreaker::adversarial::{block_adversarial, sdca_adversarial, SdcaInstance};
use spanbreaker::problem::FiniteSumProblem;

/// Block instance normalized to mu = 1 with condition ratio `kappa`.
pub fn bench_block(n: usize, kappa: f64, d_b: usize) -> FiniteSumProblem {
    let sigma = 1.0 / n as f64;
    block_adversarial(n, kappa * sigma, sigma, d_b).expect("valid bench instance")
}

pub fn bench_sdca(n: usize) -> SdcaInstance {
    sdca_adversarial(n, 2.0, 1.0).expect("valid bench instance")
}
