//! Shared solver plumbing: observers, recording, and budget bookkeeping.

use crate::problem::FiniteSumProblem;
use crate::trace::Trace;

/// Hook into solver iterations, used by support-growth instrumentation.
/// All methods default to no-ops.
pub trait SolveObserver {
    /// Called when an epoch-structured solver takes a full-gradient snapshot.
    fn on_epoch_start(&mut self, _epoch: usize, _x: &[f64]) {}
    /// Called after every iterate update. `drawn` is the sampled component
    /// index, or `None` for full-gradient steps.
    fn on_step(&mut self, _drawn: Option<usize>, _x: &[f64]) {}
}

/// Observer that does nothing.
pub struct NoopObserver;

impl SolveObserver for NoopObserver {}

/// Records suboptimality and squared distance at the current iterate.
pub(crate) fn record_point(
    trace: &mut Trace,
    problem: &FiniteSumProblem,
    grad_units: u64,
    epoch: u64,
    x: &[f64],
) {
    let subopt = problem.suboptimality(x);
    let dist = problem.dist_sq_to_minimizer(x);
    trace.push(grad_units, epoch, subopt, dist);
}

/// True when the run should stop because the recorded suboptimality reached
/// the caller's threshold.
pub(crate) fn reached_target(trace: &Trace, stop_below: Option<f64>) -> bool {
    match (stop_below, trace.last().and_then(|p| p.suboptimality)) {
        (Some(eps), Some(s)) => s <= eps,
        _ => false,
    }
}
