//! Worst-case and test instance generators, plus the support-index utilities
//! used to analyze methods whose iterates stay in the span of sampled
//! component gradients.

mod chain;
mod nonconvex;
mod sdca;

pub use chain::{block_adversarial, block_minimizer, block_q, chain_minimizer, nesterov_chain};
pub use nonconvex::{nonconvex_quadratic_sum, NonconvexSumInstance};
pub use sdca::{sdca_adversarial, sdca_expectation_eigenvalue, SdcaInstance};

/// Position (1-based) of the last nonzero entry of `x`; 0 for the zero vector.
///
/// The test is exact (`|entry| > 0.0`): on the tridiagonal instances the
/// stencil only propagates adjacent nonzeros, so no floating-point fill-in
/// can appear outside the reachable support.
pub fn last_nonzero(x: &[f64]) -> usize {
    for (j, v) in x.iter().enumerate().rev() {
        if v.abs() > 0.0 {
            return j + 1;
        }
    }
    0
}

/// Lower bound `(1 - (1 - q_n^2)/n)^k` on the expected squared-distance ratio
/// `E ||x^k - x*||^2 / ||x^0 - x*||^2` after `k` uniformly sampled component
/// steps of any solver whose iterates stay in the span of the sampled
/// component gradients on the n-block instance.
pub fn span_floor(n: usize, kappa: f64, k: u64) -> f64 {
    debug_assert!(n >= 1 && kappa >= 1.0);
    let q = block_q(n, kappa);
    let base = 1.0 - (1.0 - q * q) / n as f64;
    if k <= i32::MAX as u64 {
        base.powi(k as i32)
    } else {
        base.powf(k as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn last_nonzero_examples() {
        assert_eq!(last_nonzero(&[0.0, 2.0, 3.0, 0.0, 4.0, 0.0, 0.0, 0.0]), 5);
        assert_eq!(last_nonzero(&[0.0, 0.0, 0.0]), 0);
        assert_eq!(last_nonzero(&[1.0]), 1);
        assert_eq!(last_nonzero(&[1.0, 0.0, 0.0]), 1);
        // Negative zero counts as zero under the exact test.
        assert_eq!(last_nonzero(&[1.0, -0.0]), 1);
    }

    #[test]
    fn span_floor_examples() {
        // kappa = 1 gives q_n = 0.
        assert!((span_floor(4, 1.0, 4) - 0.31640625).abs() < 1e-15);
        assert_eq!(span_floor(17, 3.0, 0), 1.0);
        assert_eq!(span_floor(3, 1.0, 0), 1.0);
    }

    /// Direct enumeration of the size-1 binomial: for n = 2 and q^2 = 1/2,
    /// E q^{2I} over I in {0,1} with p = 1/2 each is 3/4.
    #[test]
    fn span_floor_matches_binomial_enumeration() {
        let q2: f64 = 0.5;
        let s = (1.0 + q2.sqrt()) / (1.0 - q2.sqrt());
        let kappa = 2.0 * (s * s - 1.0) + 1.0;
        let q = block_q(2, kappa);
        assert!((q * q - q2).abs() < 1e-12);
        let enumerated = 0.5 * (1.0 + q2);
        assert!((span_floor(2, kappa, 1) - enumerated).abs() < 1e-12);
    }
}
