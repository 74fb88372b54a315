//! SARAH: epochs with a recursive gradient estimator.
//!
//! Each epoch starts from the full gradient and then updates the estimator
//! in place of re-anchoring to the snapshot:
//!
//! ```text
//! v_0 = grad f(x^k),           w_1 = w_0 - eta v_0
//! v_t = (grad f_i(w_t) - grad f_i(w_{t-1})) / (n p_i) + v_{t-1}
//! w_{t+1} = w_t - eta v_t
//! ```
//!
//! Epoch lengths follow the same geometric/fixed convention as the SVRG
//! driver. Only `psi = 0` is supported.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::problem::FiniteSumProblem;
use crate::solvers::common::{reached_target, record_point, NoopObserver, SolveObserver};
use crate::solvers::sampling::{sample_geometric_failures, IndexSampler};
use crate::solvers::svrg::{EpochMode, SvrgConfig};
use crate::trace::{Trace, TraceMeta};

/// Runs SARAH with the shared epoch configuration.
pub fn sarah(problem: &FiniteSumProblem, config: &SvrgConfig) -> Result<Trace> {
    sarah_observed(problem, config, &mut NoopObserver)
}

pub fn sarah_observed(
    problem: &FiniteSumProblem,
    config: &SvrgConfig,
    observer: &mut dyn SolveObserver,
) -> Result<Trace> {
    if !problem.psi().is_none() {
        return Err(Error::Unsupported("sarah requires psi = none".into()));
    }
    // Reuse the SVRG validation rules.
    if !(config.eta > 0.0) || !(config.m >= 1.0) {
        return Err(Error::invalid("sarah needs eta > 0 and m >= 1"));
    }
    if config.dist.len() != problem.n() {
        return Err(Error::DimensionMismatch {
            expected: problem.n(),
            actual: config.dist.len(),
        });
    }
    let n = problem.n();
    let d = problem.dim();
    if let Some(x0) = &config.x0 {
        if x0.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: x0.len(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sampler = IndexSampler::new(&config.dist)?;
    let mut trace = Trace::new(TraceMeta {
        solver: "sarah".into(),
        instance: problem.descriptor().into(),
        config: format!("{config:?}"),
        seed: config.seed,
    });

    let mut x = config.x0.clone().unwrap_or_else(|| vec![0.0; d]);
    let mut estimator = vec![0.0; d];
    let mut g_cur = vec![0.0; d];
    let mut g_prev = vec![0.0; d];
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
        problem.full_grad_into(&x, &mut estimator)?;
        units += n as u64;
        observer.on_epoch_start(k, &x);

        let trips = match config.epoch_mode {
            EpochMode::Geometric => sample_geometric_failures(config.m, &mut rng) + 1,
            EpochMode::Fixed => (config.m.round() as u64).max(1),
        };
        if config.epoch_length_log {
            eprintln!("epoch {k}: inner trips = {trips}");
        }

        let mut w_prev = x.clone();
        let mut w = x.clone();
        for j in 0..d {
            w[j] -= config.eta * estimator[j];
        }
        observer.on_step(None, &w);

        let mut truncated = false;
        for _ in 1..trips {
            if let Some(cap) = config.grad_unit_cap {
                if units + 1 > cap {
                    truncated = true;
                    break;
                }
            }
            let i = sampler.sample(&mut rng);
            problem.component_grad_into(i, &w, &mut g_cur);
            problem.component_grad_into(i, &w_prev, &mut g_prev);
            let weight = 1.0 / (n as f64 * config.dist.prob(i));
            for j in 0..d {
                estimator[j] += (g_cur[j] - g_prev[j]) * weight;
            }
            w_prev.copy_from_slice(&w);
            for j in 0..d {
                w[j] -= config.eta * estimator[j];
            }
            units += 1;
            observer.on_step(Some(i), &w);
        }
        x = w;
        record_point(&mut trace, problem, units, (k + 1) as u64, &x);
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
