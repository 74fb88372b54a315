//! Stochastic dual coordinate ascent for quadratic losses.
//!
//! For losses `phi_i(t) = t^2/2` the dual coordinate minimization has the
//! closed form
//!
//! ```text
//! z = (alpha_i ||y_i||^2 / (lambda n) - y_i' x) / (1 + ||y_i||^2 / (lambda n))
//! ```
//!
//! and the maintained primal `x = (1/(lambda n)) sum_i alpha_i y_i` is
//! updated incrementally. One coordinate step costs one gradient unit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adversarial::SdcaInstance;
use crate::error::{Error, Result};
use crate::trace::{Trace, TraceMeta};

/// Dual vector together with the maintained primal point.
#[derive(Debug, Clone)]
pub struct DualState {
    pub alpha: Vec<f64>,
    pub x: Vec<f64>,
}

impl DualState {
    /// Builds the state and the primal `x = (1/(lambda n)) sum alpha_i y_i`.
    pub fn new(instance: &SdcaInstance, alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() != instance.n() {
            return Err(Error::DimensionMismatch {
                expected: instance.n(),
                actual: alpha.len(),
            });
        }
        let x = primal_from_alpha(instance, &alpha);
        Ok(DualState { alpha, x })
    }

    /// Recomputes `x` from `alpha`, returning the drift that had accumulated.
    pub fn resync(&mut self, instance: &SdcaInstance) -> f64 {
        let exact = primal_from_alpha(instance, &self.alpha);
        let drift: f64 = self
            .x
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        self.x = exact;
        drift
    }
}

fn primal_from_alpha(instance: &SdcaInstance, alpha: &[f64]) -> Vec<f64> {
    let scale = 1.0 / (instance.lambda() * instance.n() as f64);
    let mut x = vec![0.0; instance.n()];
    instance.y_apply(alpha, &mut x);
    for v in x.iter_mut() {
        *v *= scale;
    }
    x
}

/// One exact dual coordinate minimization at index `i`.
pub fn sdca_coordinate_step(instance: &SdcaInstance, state: &mut DualState, i: usize) {
    let n = instance.n() as f64;
    let lambda = instance.lambda();
    let norm_sq = instance.column_norm_sq();
    let x_sum: f64 = state.x.iter().sum();
    let dot = instance.column_dot(i, &state.x, x_sum);
    let ratio = norm_sq / (lambda * n);
    let z = (state.alpha[i] * ratio - dot) / (1.0 + ratio);
    let delta = z - state.alpha[i];
    state.alpha[i] = z;
    // x += delta/(lambda n) * y_i with y_i = c (n^2 e_i + 1).
    let c = instance.scale();
    let base = delta * c / (lambda * n);
    for v in state.x.iter_mut() {
        *v += base;
    }
    state.x[i] += base * n * n;
}

/// Result of an SDCA run: the primal trace plus recorded dual vectors.
#[derive(Debug, Clone)]
pub struct SdcaRun {
    pub trace: Trace,
    /// `(grad_units, alpha)` at each record point when requested.
    pub alpha_trace: Vec<(u64, Vec<f64>)>,
}

#[derive(Debug, Clone)]
pub struct SdcaConfig {
    pub iters: u64,
    pub seed: u64,
    pub record_every: u64,
    pub record_alpha: bool,
}

/// Runs SDCA with uniform coordinate sampling from `alpha0`, recording
/// `F(x^k) - F(0)` as suboptimality and `||x^k||^2` as squared distance
/// (the instance minimizer is the origin).
pub fn sdca(instance: &SdcaInstance, alpha0: &[f64], iters: u64, seed: u64) -> Result<SdcaRun> {
    sdca_with(
        instance,
        alpha0,
        &SdcaConfig {
            iters,
            seed,
            record_every: 1,
            record_alpha: false,
        },
    )
}

pub fn sdca_with(instance: &SdcaInstance, alpha0: &[f64], config: &SdcaConfig) -> Result<SdcaRun> {
    if config.record_every == 0 {
        return Err(Error::invalid("record_every must be >= 1"));
    }
    let n = instance.n();
    let mut state = DualState::new(instance, alpha0.to_vec())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let problem = instance.as_problem();

    let mut trace = Trace::new(TraceMeta {
        solver: "sdca".into(),
        instance: problem.descriptor().into(),
        config: format!("{config:?}"),
        seed: config.seed,
    });
    let mut alpha_trace = Vec::new();
    let record =
        |units: u64, state: &DualState, trace: &mut Trace, alphas: &mut Vec<(u64, Vec<f64>)>| {
            let dist: f64 = state.x.iter().map(|v| v * v).sum();
            let subopt = problem.objective(&state.x);
            trace.push(units, units / n as u64, Some(subopt), Some(dist));
            if config.record_alpha {
                alphas.push((units, state.alpha.clone()));
            }
        };
    record(0, &state, &mut trace, &mut alpha_trace);

    for step in 1..=config.iters {
        let i = rng.gen_range(0..n);
        sdca_coordinate_step(instance, &mut state, i);
        if step % (n as u64).max(1) == 0 {
            let drift = state.resync(instance);
            debug_assert!(
                drift <= 1e-10 * (1.0 + state.x.iter().map(|v| v * v).sum::<f64>().sqrt()),
                "maintained primal drifted by {drift}"
            );
        }
        if step % config.record_every == 0 || step == config.iters {
            record(step, &state, &mut trace, &mut alpha_trace);
        }
    }
    Ok(SdcaRun { trace, alpha_trace })
}
