//! Per-step support-growth instrumentation for the block instances.

use crate::adversarial::{block_q, last_nonzero};
use crate::problem::FiniteSumProblem;
use crate::solvers::SolveObserver;

/// Observes a solver running on a block instance from the origin and tracks,
/// after every iterate update:
///
/// - the support index `N(x_i)` of every block against the draw counts
///   `I_{k,i}`, recording the worst excess `N(x_i) - I_{k,i}` seen;
/// - optionally, the distance floor `sum_i q^{2 N(x_i)} / n` against the
///   actual squared-distance ratio.
pub struct BlockSupportTracker {
    n: usize,
    d_b: usize,
    q: f64,
    x_star: Vec<f64>,
    dist0: f64,
    check_floor: bool,
    draws: Vec<u64>,
    /// Iterate updates observed so far.
    pub steps: u64,
    /// Worst `N(x_i) - I_{k,i}` over all steps and blocks.
    pub max_excess: i64,
    /// First step (1-based) at which some block had `N(x_i) > I_{k,i}`.
    pub first_excess_step: Option<u64>,
    /// Steps at which the distance ratio fell below the support floor.
    pub floor_violations: u64,
    /// `(step, dist_ratio)` for every observed step.
    pub dist_ratio: Vec<(u64, f64)>,
}

impl BlockSupportTracker {
    /// `kappa` is the per-component condition ratio `L/sigma` of the block
    /// instance; the start point is assumed to be the origin.
    pub fn new(problem: &FiniteSumProblem, kappa: f64, check_floor: bool) -> Self {
        let n = problem.n();
        let d_b = problem.dim() / n;
        let x_star = problem
            .known_minimizer()
            .expect("block instance has a known minimizer")
            .point
            .clone();
        let dist0: f64 = x_star.iter().map(|v| v * v).sum();
        BlockSupportTracker {
            n,
            d_b,
            q: block_q(n, kappa),
            x_star,
            dist0,
            check_floor,
            draws: vec![0; n],
            steps: 0,
            max_excess: i64::MIN,
            first_excess_step: None,
            floor_violations: 0,
            dist_ratio: Vec::new(),
        }
    }

    pub fn draws(&self) -> &[u64] {
        &self.draws
    }
}

impl SolveObserver for BlockSupportTracker {
    fn on_step(&mut self, drawn: Option<usize>, x: &[f64]) {
        if let Some(i) = drawn {
            self.draws[i] += 1;
        }
        self.steps += 1;

        let mut floor = 0.0;
        let mut dist = 0.0;
        for i in 0..self.n {
            let block = &x[i * self.d_b..(i + 1) * self.d_b];
            let support = last_nonzero(block) as i64;
            let excess = support - self.draws[i] as i64;
            if excess > self.max_excess {
                self.max_excess = excess;
            }
            if excess > 0 && self.first_excess_step.is_none() {
                self.first_excess_step = Some(self.steps);
            }
            if self.check_floor {
                floor += self.q.powi(2 * support as i32);
                for (a, b) in block
                    .iter()
                    .zip(&self.x_star[i * self.d_b..(i + 1) * self.d_b])
                {
                    dist += (a - b) * (a - b);
                }
            }
        }
        if self.check_floor {
            let floor = floor / self.n as f64;
            let ratio = dist / self.dist0;
            if ratio < floor {
                self.floor_violations += 1;
            }
            self.dist_ratio.push((self.steps, ratio));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversarial::block_adversarial;
    use crate::problem::SamplingDistribution;
    use crate::solvers::{saga_observed, SagaConfig};

    /// SAGA from the origin with a zero table never lets a block's support
    /// exceed its draw count, and never dips under the support floor.
    #[test]
    fn saga_respects_support_bound_and_floor() {
        let (n, kappa, d_b) = (16usize, 4.0, 8usize);
        let sigma = 1.0 / n as f64;
        let p = block_adversarial(n, kappa * sigma, sigma, d_b).unwrap();
        for seed in 0..5 {
            let mut tracker = BlockSupportTracker::new(&p, kappa, true);
            let cfg = SagaConfig::new(SamplingDistribution::uniform(n), 3 * n as u64, seed);
            saga_observed(&p, &cfg, &mut tracker).unwrap();
            assert!(
                tracker.max_excess <= 0,
                "seed {seed}: support exceeded draws by {}",
                tracker.max_excess
            );
            assert_eq!(tracker.floor_violations, 0, "seed {seed}");
        }
    }
}
