//! Seeded sampling helpers shared by the stochastic solvers.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::problem::SamplingDistribution;

/// Component index sampler over a fixed probability vector.
pub(crate) struct IndexSampler {
    weights: WeightedIndex<f64>,
}

impl IndexSampler {
    pub fn new(dist: &SamplingDistribution) -> Result<Self> {
        let weights = WeightedIndex::new(dist.probabilities().iter().cloned())
            .map_err(|e| Error::invalid(format!("bad sampling distribution: {e}")))?;
        Ok(IndexSampler { weights })
    }

    #[inline]
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        self.weights.sample(rng)
    }
}

/// Number of failures before the first success of a Bernoulli(1/m) sequence,
/// sampled by inverse CDF as `floor(ln(u) / ln(1 - 1/m))` with `u` uniform on
/// `(0, 1]`. The inner-loop trip count `M + 1` then has expectation `m`.
pub(crate) fn sample_geometric_failures(m: f64, rng: &mut ChaCha8Rng) -> u64 {
    debug_assert!(m >= 1.0);
    if m <= 1.0 {
        return 0;
    }
    let u = 1.0 - rng.gen::<f64>(); // in (0, 1]
    let denom = (1.0 - 1.0 / m).ln();
    (u.ln() / denom).floor() as u64
}
