//! Proximal SVRG with geometrically distributed epoch lengths.
//!
//! Each epoch takes a full-gradient snapshot at the anchor point and then
//! runs a randomly sized inner loop of variance-reduced proximal steps:
//!
//! ```text
//! g_t = snapshot + (grad f_i(w_t) - grad f_i(w_0)) / (n p_i)
//! w_{t+1} = prox_{eta psi}(w_t - eta g_t)
//! ```
//!
//! The inner trip count is `M + 1` with `M` geometric (failures before the
//! first success at probability `1/m`), so epochs have expected length `m`;
//! `M` is resampled every epoch. With `fixed` mode the inner loop runs
//! exactly `round(m)` trips.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::problem::{prox_psi_in_place, FiniteSumProblem, SamplingDistribution};
use crate::solvers::common::{reached_target, record_point, NoopObserver, SolveObserver};
use crate::solvers::sampling::{sample_geometric_failures, IndexSampler};
use crate::trace::{Trace, TraceMeta};

/// Inner-loop length convention per epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpochMode {
    /// Trip count `M + 1`, `M ~ Geometric(1/m)` on `{0, 1, ...}`, mean `m`.
    Geometric,
    /// Exactly `round(m)` trips.
    Fixed,
}

/// Configuration shared by the SVRG and SARAH drivers.
#[derive(Debug, Clone)]
pub struct SvrgConfig {
    /// Inner step size; must satisfy `eta < 1/(4 L_Q)` for the guaranteed
    /// rate to apply (not enforced here).
    pub eta: f64,
    /// Expected epoch length (positive real, >= 1).
    pub m: f64,
    pub epoch_mode: EpochMode,
    /// Number of epochs to run.
    pub epochs: usize,
    pub dist: SamplingDistribution,
    pub seed: u64,
    /// Start point; the origin when absent.
    pub x0: Option<Vec<f64>>,
    /// Hard budget in gradient units; exceeding it truncates the trace.
    pub grad_unit_cap: Option<u64>,
    /// Stop once recorded suboptimality falls to this value.
    pub stop_below: Option<f64>,
    /// Sink for the sampled epoch lengths, one per epoch.
    pub epoch_length_log: bool,
    /// Also record every this-many inner steps, for iteration-granular
    /// accuracy-crossing measurements. Epoch-end records are always kept.
    pub record_inner_every: Option<u64>,
}

impl SvrgConfig {
    pub fn new(eta: f64, m: f64, epochs: usize, dist: SamplingDistribution, seed: u64) -> Self {
        SvrgConfig {
            eta,
            m,
            epoch_mode: EpochMode::Geometric,
            epochs,
            dist,
            seed,
            x0: None,
            grad_unit_cap: None,
            stop_below: None,
            epoch_length_log: false,
            record_inner_every: None,
        }
    }

    fn validate(&self, problem: &FiniteSumProblem) -> Result<()> {
        if !(self.eta > 0.0) {
            return Err(Error::invalid(format!("eta must be > 0, got {}", self.eta)));
        }
        if !(self.m >= 1.0) {
            return Err(Error::invalid(format!("m must be >= 1, got {}", self.m)));
        }
        if self.dist.len() != problem.n() {
            return Err(Error::DimensionMismatch {
                expected: problem.n(),
                actual: self.dist.len(),
            });
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != problem.dim() {
                return Err(Error::DimensionMismatch {
                    expected: problem.dim(),
                    actual: x0.len(),
                });
            }
        }
        Ok(())
    }
}

/// Runs proximal SVRG and records one trace point per epoch.
pub fn prox_svrg(problem: &FiniteSumProblem, config: &SvrgConfig) -> Result<Trace> {
    prox_svrg_observed(problem, config, &mut NoopObserver)
}

/// [`prox_svrg`] with an iteration observer. Sampled epoch lengths are
/// reported to stderr when `epoch_length_log` is set.
pub fn prox_svrg_observed(
    problem: &FiniteSumProblem,
    config: &SvrgConfig,
    observer: &mut dyn SolveObserver,
) -> Result<Trace> {
    config.validate(problem)?;
    let n = problem.n();
    let d = problem.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sampler = IndexSampler::new(&config.dist)?;

    let mut trace = Trace::new(TraceMeta {
        solver: "svrg".into(),
        instance: problem.descriptor().into(),
        config: format!("{config:?}"),
        seed: config.seed,
    });

    let mut x = config.x0.clone().unwrap_or_else(|| vec![0.0; d]);
    let mut snapshot = vec![0.0; d];
    let mut g_cur = vec![0.0; d];
    let mut g_anchor = vec![0.0; d];
    let mut units: u64 = 0;
    record_point(&mut trace, problem, units, 0, &x);
    if reached_target(&trace, config.stop_below) {
        return Ok(trace);
    }

    for k in 0..config.epochs {
        if let Some(cap) = config.grad_unit_cap {
            if units + n as u64 > cap {
                trace.complete = false;
                return Ok(trace);
            }
        }
        problem.full_grad_into(&x, &mut snapshot)?;
        units += n as u64;
        observer.on_epoch_start(k, &x);

        let trips = match config.epoch_mode {
            EpochMode::Geometric => sample_geometric_failures(config.m, &mut rng) + 1,
            EpochMode::Fixed => (config.m.round() as u64).max(1),
        };
        if config.epoch_length_log {
            eprintln!("epoch {k}: inner trips = {trips}");
        }

        let mut w = x.clone();
        let mut truncated = false;
        for _ in 0..trips {
            if let Some(cap) = config.grad_unit_cap {
                if units + 1 > cap {
                    truncated = true;
                    break;
                }
            }
            let i = sampler.sample(&mut rng);
            problem.component_grad_into(i, &w, &mut g_cur);
            problem.component_grad_into(i, &x, &mut g_anchor);
            let weight = 1.0 / (n as f64 * config.dist.prob(i));
            for j in 0..d {
                w[j] -= config.eta * (snapshot[j] + (g_cur[j] - g_anchor[j]) * weight);
            }
            prox_psi_in_place(problem.psi(), config.eta, &mut w);
            units += 1;
            observer.on_step(Some(i), &w);
            if let Some(every) = config.record_inner_every {
                if units.is_multiple_of(every) {
                    record_point(&mut trace, problem, units, (k + 1) as u64, &w);
                    if reached_target(&trace, config.stop_below) {
                        return Ok(trace);
                    }
                }
            }
        }
        x = w;
        if trace.last().map(|p| p.grad_units) != Some(units) {
            record_point(&mut trace, problem, units, (k + 1) as u64, &x);
        }
        if truncated {
            trace.complete = false;
            return Ok(trace);
        }
        if reached_target(&trace, config.stop_below) {
            return Ok(trace);
        }
    }
    Ok(trace)
}
