//! Finite-sum minimization solvers and a worst-case experiment harness.
//!
//! The crate minimizes objectives of the form
//! `F(x) = (1/n) sum_i f_i(x) + psi(x)` through component-gradient oracles
//! ([`problem::FiniteSumProblem`]) and provides:
//!
//! - hybrid variance-reduced solvers (proximal SVRG with geometric epoch
//!   lengths, SARAH) together with the step-size/epoch-length choices that
//!   make their epoch complexity scale with `n / (1 + ln(n/kappa))` in the
//!   well-conditioned big-data regime;
//! - span-restricted baselines (SAGA, full gradient descent) and dual
//!   coordinate ascent (SDCA) for comparison;
//! - generators for the worst-case instances on which the separation between
//!   hybrid and span-restricted methods is measurable at desk scale
//!   ([`adversarial`]);
//! - an experiment harness with empirical rate estimation, accuracy-crossing
//!   measurement, support-growth tracking, and independent oracles
//!   ([`harness`]).
//!
//! Solver runs are deterministic given their seed; problems are immutable
//! and safe to share across threads.

// Validation predicates use `!(x > 0.0)` so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversarial;
pub mod error;
pub mod harness;
pub mod problem;
pub mod solvers;
pub mod trace;

pub use error::{Error, Result};
pub use problem::{
    effective_condition_number, effective_lipschitz, full_grad, importance_distribution,
    nonconvex_importance_distribution, prox_psi, second_moment_lipschitz, FiniteSumProblem, Psi,
    SamplingDistribution,
};
pub use trace::{Trace, TraceMeta, TracePoint};
