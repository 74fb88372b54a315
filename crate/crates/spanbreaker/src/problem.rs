//! Finite-sum problem abstraction.
//!
//! A [`FiniteSumProblem`] describes an objective of the form
//!
//! ```text
//! F(x) = f(x) + psi(x) = (1/n) * sum_i f_i(x) + psi(x)
//! ```
//!
//! through component-gradient oracles, smoothness/strong-convexity constants,
//! and an optional known minimizer. Problems are immutable after construction
//! and their oracles are pure functions of `(i, x)`, so they can be shared
//! freely across concurrent solver runs.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Gradient oracle: writes the gradient of component `i` at `x` into `out`.
pub type GradFn = Arc<dyn Fn(usize, &[f64], &mut [f64]) + Send + Sync>;
/// Value oracle for the smooth part `f(x) = (1/n) sum_i f_i(x)`.
pub type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Value oracle for a single component `f_i(x)`.
pub type ComponentValueFn = Arc<dyn Fn(usize, &[f64]) -> f64 + Send + Sync>;
/// Fast full-gradient oracle, writing `(1/n) sum_i grad f_i(x)` into `out`.
pub type FullGradFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
/// Numerically stable suboptimality oracle `F(x) - F(x*)`.
pub type SuboptFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Regularizer descriptor for the nonsmooth term `psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psi {
    /// `psi = 0`.
    None,
    /// `psi(x) = weight * ||x||_1` with `weight >= 0`.
    L1 { weight: f64 },
}

impl Psi {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Psi::None => 0.0,
            Psi::L1 { weight } => weight * x.iter().map(|v| v.abs()).sum::<f64>(),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Psi::None)
    }
}

/// A known minimizer together with the objective value there.
#[derive(Debug, Clone)]
pub struct KnownMinimizer {
    pub point: Vec<f64>,
    pub value: f64,
}

/// Oracle bundle for `F(x) = (1/n) sum_i f_i(x) + psi(x)`.
pub struct FiniteSumProblem {
    n: usize,
    d: usize,
    grad: GradFn,
    smooth_value: ValueFn,
    component_value: Option<ComponentValueFn>,
    full_grad: Option<FullGradFn>,
    subopt: Option<SuboptFn>,
    smooth_constants: Vec<f64>,
    lipschitz: f64,
    mu: f64,
    psi: Psi,
    minimizer: Option<KnownMinimizer>,
    descriptor: String,
}

impl fmt::Debug for FiniteSumProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteSumProblem")
            .field("n", &self.n)
            .field("d", &self.d)
            .field("L", &self.lipschitz)
            .field("mu", &self.mu)
            .field("psi", &self.psi)
            .field("descriptor", &self.descriptor)
            .finish()
    }
}

impl FiniteSumProblem {
    pub fn builder(n: usize, d: usize) -> ProblemBuilder {
        ProblemBuilder::new(n, d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Per-component Lipschitz constants `L_i`.
    pub fn smooth_constants(&self) -> &[f64] {
        &self.smooth_constants
    }

    /// Lipschitz constant of the averaged smooth part `f`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Strong-convexity modulus of `F`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn psi(&self) -> Psi {
        self.psi
    }

    pub fn known_minimizer(&self) -> Option<&KnownMinimizer> {
        self.minimizer.as_ref()
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Gradient of component `i` at `x`, written into `out`.
    pub fn component_grad_into(&self, i: usize, x: &[f64], out: &mut [f64]) {
        debug_assert!(i < self.n);
        debug_assert_eq!(x.len(), self.d);
        (self.grad)(i, x, out);
    }

    pub fn component_grad(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.d];
        self.component_grad_into(i, x, &mut out);
        out
    }

    /// Value of component `f_i` at `x`, when the generator exposes it.
    pub fn component_value(&self, i: usize, x: &[f64]) -> Option<f64> {
        self.component_value.as_ref().map(|f| f(i, x))
    }

    pub fn has_component_values(&self) -> bool {
        self.component_value.is_some()
    }

    /// Value of the smooth part `f(x)`.
    pub fn smooth_value(&self, x: &[f64]) -> f64 {
        (self.smooth_value)(x)
    }

    /// Full objective `F(x) = f(x) + psi(x)`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        self.smooth_value(x) + self.psi.value(x)
    }

    /// `F(x) - F(x*)` when the minimizer is known.
    ///
    /// Generated instances install a dedicated oracle that evaluates the
    /// quadratic form around the exact minimizer, which stays accurate far
    /// below the cancellation floor of `objective(x) - value`.
    pub fn suboptimality(&self, x: &[f64]) -> Option<f64> {
        if let Some(f) = &self.subopt {
            Some(f(x))
        } else {
            self.minimizer.as_ref().map(|m| self.objective(x) - m.value)
        }
    }

    /// Squared distance to the known minimizer.
    pub fn dist_sq_to_minimizer(&self, x: &[f64]) -> Option<f64> {
        self.minimizer
            .as_ref()
            .map(|m| x.iter().zip(&m.point).map(|(a, b)| (a - b) * (a - b)).sum())
    }

    /// Full gradient `(1/n) sum_i grad f_i(x)`, written into `out`.
    ///
    /// Counts as `n` gradient evaluations in any attached budget meter.
    pub fn full_grad_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_dim(x)?;
        if let Some(f) = &self.full_grad {
            f(x, out);
            return Ok(());
        }
        out.fill(0.0);
        let mut g = vec![0.0; self.d];
        for i in 0..self.n {
            (self.grad)(i, x, &mut g);
            for (o, v) in out.iter_mut().zip(&g) {
                *o += v;
            }
        }
        let inv = 1.0 / self.n as f64;
        for o in out.iter_mut() {
            *o *= inv;
        }
        Ok(())
    }
}

/// Full gradient `(1/n) sum_i grad f_i(x)` of the smooth part.
pub fn full_grad(problem: &FiniteSumProblem, x: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; problem.dim()];
    problem.full_grad_into(x, &mut out)?;
    Ok(out)
}

/// Proximal map of `eta * psi`: `argmin_y psi(y) + ||y - v||^2 / (2 eta)`.
///
/// Identity for `psi = 0`; soft-thresholding by `eta * weight` for `psi = L1`.
pub fn prox_psi(problem: &FiniteSumProblem, eta: f64, v: &[f64]) -> Result<Vec<f64>> {
    if eta <= 0.0 {
        return Err(Error::invalid(format!(
            "prox step eta must be > 0, got {eta}"
        )));
    }
    let mut out = v.to_vec();
    prox_psi_in_place(problem.psi(), eta, &mut out);
    Ok(out)
}

/// In-place variant used by solver inner loops.
pub fn prox_psi_in_place(psi: Psi, eta: f64, v: &mut [f64]) {
    match psi {
        Psi::None => {}
        Psi::L1 { weight } => {
            let t = eta * weight;
            if t == 0.0 {
                return;
            }
            for x in v.iter_mut() {
                *x = if *x > t {
                    *x - t
                } else if *x < -t {
                    *x + t
                } else {
                    0.0
                };
            }
        }
    }
}

/// Probability vector used to pick components in stochastic solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingDistribution {
    p: Vec<f64>,
}

impl SamplingDistribution {
    /// Validates that all `p_i > 0` and `sum p_i = 1` within `1e-12`.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::invalid("sampling distribution must be non-empty"));
        }
        if p.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
            return Err(Error::invalid("all sampling probabilities must be > 0"));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "sampling probabilities must sum to 1 (got {sum})"
            )));
        }
        Ok(SamplingDistribution { p })
    }

    pub fn uniform(n: usize) -> Self {
        SamplingDistribution {
            p: vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.p[i]
    }
}

/// Effective Lipschitz constant `L_Q = max_i L_i / (p_i n)` seen by
/// importance-sampled variance-reduced steps.
pub fn effective_lipschitz(problem: &FiniteSumProblem, dist: &SamplingDistribution) -> Result<f64> {
    if dist.len() != problem.n() {
        return Err(Error::DimensionMismatch {
            expected: problem.n(),
            actual: dist.len(),
        });
    }
    let n = problem.n() as f64;
    let lq = problem
        .smooth_constants()
        .iter()
        .zip(dist.probabilities())
        .map(|(&li, &pi)| li / (pi * n))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(lq)
}

/// Effective condition number `kappa_Q = L_Q / mu`.
pub fn effective_condition_number(
    problem: &FiniteSumProblem,
    dist: &SamplingDistribution,
) -> Result<f64> {
    Ok(effective_lipschitz(problem, dist)? / problem.mu())
}

/// Sampling proportional to the Lipschitz constants, `p_i = L_i / sum_j L_j`.
/// This choice minimizes `L_Q` and gives `L_Q = mean(L_i)`.
pub fn importance_distribution(problem: &FiniteSumProblem) -> Result<SamplingDistribution> {
    let s: f64 = problem.smooth_constants().iter().sum();
    if s <= 0.0 {
        return Err(Error::invalid("all L_i must be positive"));
    }
    SamplingDistribution::new(problem.smooth_constants().iter().map(|li| li / s).collect())
}

/// Sampling proportional to squared Lipschitz constants,
/// `p_i = L_i^2 / sum_j L_j^2`, which minimizes the second-moment constant
/// used for nonconvex components.
pub fn nonconvex_importance_distribution(
    problem: &FiniteSumProblem,
) -> Result<SamplingDistribution> {
    let s: f64 = problem.smooth_constants().iter().map(|l| l * l).sum();
    if s <= 0.0 {
        return Err(Error::invalid("all L_i must be positive"));
    }
    SamplingDistribution::new(
        problem
            .smooth_constants()
            .iter()
            .map(|li| li * li / s)
            .collect(),
    )
}

/// Second-moment smoothness constant `(sum_i L_i^2 / (n^2 p_i))^(1/2)`.
///
/// Bounds the variance of importance-weighted component-gradient differences;
/// with the squared-importance distribution it reduces to the root mean
/// square of the `L_i`.
pub fn second_moment_lipschitz(
    problem: &FiniteSumProblem,
    dist: &SamplingDistribution,
) -> Result<f64> {
    if dist.len() != problem.n() {
        return Err(Error::DimensionMismatch {
            expected: problem.n(),
            actual: dist.len(),
        });
    }
    let n2 = (problem.n() as f64) * (problem.n() as f64);
    let s: f64 = problem
        .smooth_constants()
        .iter()
        .zip(dist.probabilities())
        .map(|(&li, &pi)| li * li / (n2 * pi))
        .sum();
    Ok(s.sqrt())
}

/// Builder for [`FiniteSumProblem`]; validates the structural invariants on
/// `build()`.
pub struct ProblemBuilder {
    n: usize,
    d: usize,
    grad: Option<GradFn>,
    smooth_value: Option<ValueFn>,
    component_value: Option<ComponentValueFn>,
    full_grad: Option<FullGradFn>,
    subopt: Option<SuboptFn>,
    smooth_constants: Option<Vec<f64>>,
    lipschitz: Option<f64>,
    mu: Option<f64>,
    psi: Psi,
    minimizer_point: Option<Vec<f64>>,
    minimizer_value: Option<f64>,
    descriptor: String,
}

impl ProblemBuilder {
    fn new(n: usize, d: usize) -> Self {
        ProblemBuilder {
            n,
            d,
            grad: None,
            smooth_value: None,
            component_value: None,
            full_grad: None,
            subopt: None,
            smooth_constants: None,
            lipschitz: None,
            mu: None,
            psi: Psi::None,
            minimizer_point: None,
            minimizer_value: None,
            descriptor: String::from("custom"),
        }
    }

    pub fn component_grad(
        mut self,
        f: impl Fn(usize, &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        self.grad = Some(Arc::new(f));
        self
    }

    pub fn smooth_value(mut self, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.smooth_value = Some(Arc::new(f));
        self
    }

    pub fn component_value(
        mut self,
        f: impl Fn(usize, &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.component_value = Some(Arc::new(f));
        self
    }

    pub fn full_grad(mut self, f: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        self.full_grad = Some(Arc::new(f));
        self
    }

    pub fn suboptimality_oracle(
        mut self,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.subopt = Some(Arc::new(f));
        self
    }

    pub fn smooth_constants(mut self, l: Vec<f64>) -> Self {
        self.smooth_constants = Some(l);
        self
    }

    pub fn lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn strong_convexity(mut self, mu: f64) -> Self {
        self.mu = Some(mu);
        self
    }

    pub fn psi(mut self, psi: Psi) -> Self {
        self.psi = psi;
        self
    }

    pub fn known_minimizer(mut self, point: Vec<f64>, value: Option<f64>) -> Self {
        self.minimizer_point = Some(point);
        self.minimizer_value = value;
        self
    }

    pub fn descriptor(mut self, s: impl Into<String>) -> Self {
        self.descriptor = s.into();
        self
    }

    pub fn build(self) -> Result<FiniteSumProblem> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::invalid("n and d must be >= 1"));
        }
        let grad = self
            .grad
            .ok_or_else(|| Error::invalid("component gradient oracle is required"))?;
        let smooth_value = self
            .smooth_value
            .ok_or_else(|| Error::invalid("smooth value oracle is required"))?;
        let smooth_constants = self
            .smooth_constants
            .ok_or_else(|| Error::invalid("per-component constants L_i are required"))?;
        if smooth_constants.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: smooth_constants.len(),
            });
        }
        if smooth_constants.iter().any(|&l| l <= 0.0 || !l.is_finite()) {
            return Err(Error::invalid("all L_i must be positive and finite"));
        }
        let max_li = smooth_constants.iter().cloned().fold(f64::MIN, f64::max);
        let lipschitz = self.lipschitz.unwrap_or(max_li);
        let mu = self
            .mu
            .ok_or_else(|| Error::invalid("strong-convexity modulus mu is required"))?;
        if !(mu > 0.0) {
            return Err(Error::invalid("mu must be positive"));
        }
        if mu > lipschitz * (1.0 + 1e-12) {
            return Err(Error::invalid(format!("mu = {mu} exceeds L = {lipschitz}")));
        }
        if lipschitz > max_li * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "L = {lipschitz} exceeds max_i L_i = {max_li}"
            )));
        }
        if let Psi::L1 { weight } = self.psi {
            if weight < 0.0 {
                return Err(Error::invalid("l1 weight must be >= 0"));
            }
        }

        let mut problem = FiniteSumProblem {
            n: self.n,
            d: self.d,
            grad,
            smooth_value,
            component_value: self.component_value,
            full_grad: self.full_grad,
            subopt: self.subopt,
            smooth_constants,
            lipschitz,
            mu,
            psi: self.psi,
            minimizer: None,
            descriptor: self.descriptor,
        };

        if let Some(point) = self.minimizer_point {
            if point.len() != problem.d {
                return Err(Error::DimensionMismatch {
                    expected: problem.d,
                    actual: point.len(),
                });
            }
            let value = self
                .minimizer_value
                .unwrap_or_else(|| problem.objective(&point));
            if problem.psi.is_none() {
                // Scale-aware stationarity check on the claimed minimizer.
                let mut g = vec![0.0; problem.d];
                problem.full_grad_into(&point, &mut g)?;
                let gnorm = norm(&g);
                let mut probe = vec![0.0; problem.d];
                problem.component_grad_into(0, &vec![0.0; problem.d], &mut probe);
                let tol_min = 1e-8 * norm(&probe).max(1.0);
                if gnorm > tol_min {
                    return Err(Error::invalid(format!(
                        "known minimizer fails stationarity: ||grad F(x*)|| = {gnorm:.3e} > {tol_min:.3e}"
                    )));
                }
            }
            problem.minimizer = Some(KnownMinimizer { point, value });
        }

        Ok(problem)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
