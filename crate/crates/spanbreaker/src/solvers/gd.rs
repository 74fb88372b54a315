//! Proximal full-gradient descent baseline. Each iteration costs `n`
//! gradient units.

use crate::error::{Error, Result};
use crate::problem::{prox_psi_in_place, FiniteSumProblem};
use crate::solvers::common::{reached_target, record_point, NoopObserver, SolveObserver};
use crate::trace::{Trace, TraceMeta};

#[derive(Debug, Clone)]
pub struct GdConfig {
    /// Step size; `eta = 0` produces a constant trace.
    pub eta: f64,
    pub iters: u64,
    pub x0: Option<Vec<f64>>,
    pub stop_below: Option<f64>,
}

/// `x <- prox_{eta psi}(x - eta grad f(x))` for `iters` iterations.
pub fn gradient_descent(problem: &FiniteSumProblem, eta: f64, iters: u64) -> Result<Trace> {
    gradient_descent_observed(
        problem,
        &GdConfig {
            eta,
            iters,
            x0: None,
            stop_below: None,
        },
        &mut NoopObserver,
    )
}

pub fn gradient_descent_observed(
    problem: &FiniteSumProblem,
    config: &GdConfig,
    observer: &mut dyn SolveObserver,
) -> Result<Trace> {
    if config.eta < 0.0 {
        return Err(Error::invalid(format!(
            "eta must be >= 0, got {}",
            config.eta
        )));
    }
    let d = problem.dim();
    if let Some(x0) = &config.x0 {
        if x0.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: x0.len(),
            });
        }
    }
    let mut trace = Trace::new(TraceMeta {
        solver: "gd".into(),
        instance: problem.descriptor().into(),
        config: format!("{config:?}"),
        seed: 0,
    });
    let mut x = config.x0.clone().unwrap_or_else(|| vec![0.0; d]);
    let mut g = vec![0.0; d];
    let n = problem.n() as u64;
    record_point(&mut trace, problem, 0, 0, &x);
    if reached_target(&trace, config.stop_below) {
        return Ok(trace);
    }
    for k in 1..=config.iters {
        problem.full_grad_into(&x, &mut g)?;
        for j in 0..d {
            x[j] -= config.eta * g[j];
        }
        if config.eta > 0.0 {
            prox_psi_in_place(problem.psi(), config.eta, &mut x);
        }
        observer.on_step(None, &x);
        record_point(&mut trace, problem, k * n, k, &x);
        if reached_target(&trace, config.stop_below) {
            return Ok(trace);
        }
    }
    Ok(trace)
}
