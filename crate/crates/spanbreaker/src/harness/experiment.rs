//! Experiment drivers: accuracy crossings, high-accuracy reference solves,
//! and the span-vs-hybrid speedup comparison.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adversarial::block_adversarial;
use crate::error::{Error, Result};
use crate::problem::{
    effective_condition_number, effective_lipschitz, importance_distribution, prox_psi_in_place,
    FiniteSumProblem, SamplingDistribution,
};
use crate::solvers::{
    optimal_rate_bound, optimal_svrg_params, prox_svrg, saga, SagaConfig, SvrgConfig,
};
use crate::trace::Trace;

/// First cumulative gradient-unit count at which recorded suboptimality is
/// `<= eps`; `None` when the trace never reaches it.
pub fn complexity_to_eps(trace: &Trace, eps: f64) -> Option<u64> {
    trace
        .points
        .iter()
        .find(|p| p.suboptimality.map(|s| s <= eps).unwrap_or(false))
        .map(|p| p.grad_units)
}

/// Output of [`reference_solve`].
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Gradient units spent, including the certificate checks.
    pub grad_units: u64,
}

/// High-accuracy solve supplying `F(x*)` when no closed form exists.
///
/// Runs variance-reduced epochs with the optimal parameter choice and
/// importance sampling until the certificate `||grad F(x)||^2 / (2 mu)`
/// drops to `target_tol`. Only `psi = 0` is supported (the certificate
/// needs the plain gradient norm).
pub fn reference_solve(problem: &FiniteSumProblem, target_tol: f64) -> Result<ReferenceSolution> {
    const MAX_EPOCHS: u64 = 100_000;
    if !problem.psi().is_none() {
        return Err(Error::Unsupported(
            "reference solve requires psi = none".into(),
        ));
    }
    if !(target_tol > 0.0) {
        return Err(Error::invalid("target_tol must be positive"));
    }
    let n = problem.n();
    let d = problem.dim();
    let dist = importance_distribution(problem)?;
    let l_q = effective_lipschitz(problem, &dist)?;
    let kappa_q = effective_condition_number(problem, &dist)?;
    let (m, eta) = optimal_svrg_params(n, kappa_q, l_q)?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let sampler = crate::solvers::sampler_for(&dist)?;
    let mut x = vec![0.0; d];
    let mut snapshot = vec![0.0; d];
    let mut g_cur = vec![0.0; d];
    let mut g_anchor = vec![0.0; d];
    let mut units: u64 = 0;

    for _epoch in 0..=MAX_EPOCHS {
        problem.full_grad_into(&x, &mut snapshot)?;
        units += n as u64;
        let gnorm_sq: f64 = snapshot.iter().map(|v| v * v).sum();
        if gnorm_sq / (2.0 * problem.mu()) <= target_tol {
            let value = problem.objective(&x);
            return Ok(ReferenceSolution {
                x,
                value,
                grad_units: units,
            });
        }
        let trips = crate::solvers::geometric_trips(m, &mut rng);
        let mut w = x.clone();
        for _ in 0..trips {
            let i = sampler.sample(&mut rng);
            problem.component_grad_into(i, &w, &mut g_cur);
            problem.component_grad_into(i, &x, &mut g_anchor);
            let weight = 1.0 / (n as f64 * dist.prob(i));
            for j in 0..d {
                w[j] -= eta * (snapshot[j] + (g_cur[j] - g_anchor[j]) * weight);
            }
            prox_psi_in_place(problem.psi(), eta, &mut w);
            units += 1;
        }
        x = w;
    }
    Err(Error::BudgetExceeded(format!(
        "reference solve did not certify {target_tol:e} within {MAX_EPOCHS} epochs ({units} units)"
    )))
}

/// One row of the speedup table.
#[derive(Debug, Clone)]
pub struct SpeedupRow {
    pub n: usize,
    pub kappa: f64,
    /// Relative accuracy target `1/n^alpha` (of the initial suboptimality).
    pub eps: f64,
    /// Mean gradient units to reach the target, rounded.
    pub k_svrg: u64,
    pub k_saga: u64,
    pub ratio: f64,
    /// False when some run hit its budget before reaching the target.
    pub reached: bool,
}

/// For each `n`: builds the block instance with `kappa = n^beta`, runs the
/// hybrid solver (optimal parameters) and the span baseline from the origin
/// to relative accuracy `eps = 1/n^alpha`, and reports mean gradient units.
///
/// Accuracy is relative to the initial suboptimality `F(0) - F*`, which keeps
/// the target meaningful across instance scales.
pub fn speedup_experiment(
    n_list: &[usize],
    alpha: f64,
    beta: f64,
    seeds: &[u64],
) -> Result<Vec<SpeedupRow>> {
    const BLOCK_DIM: usize = 2;
    if !(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid("alpha and beta must lie in (0, 1)"));
    }
    if seeds.is_empty() {
        return Err(Error::invalid("seed list must be non-empty"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("n_list must be strictly increasing"));
    }

    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n < 2 {
            return Err(Error::invalid("speedup experiment needs n >= 2"));
        }
        let nf = n as f64;
        let kappa = nf.powf(beta);
        let sigma = 1.0 / nf; // normalizes mu = sigma * n = 1
        let problem = block_adversarial(n, kappa * sigma, sigma, BLOCK_DIM)?;
        let s0 = problem
            .suboptimality(&vec![0.0; problem.dim()])
            .expect("block instance has a reference value");
        let eps_rel = nf.powf(-alpha);
        let eps_abs = eps_rel * s0;

        let dist = SamplingDistribution::uniform(n);
        let l_q = effective_lipschitz(&problem, &dist)?;
        let kappa_q = effective_condition_number(&problem, &dist)?;
        let (m, eta) = optimal_svrg_params(n, kappa_q, l_q)?;
        // Budget: the guaranteed-rate epoch count with generous margin.
        let bound = optimal_rate_bound(n, kappa_q);
        let epochs_cap =
            ((eps_rel.recip().ln() / bound.recip().ln()).ceil() as usize).max(1) * 3 + 10;
        let saga_cap = (30.0 * nf * (eps_rel.recip().ln() + 2.0)).ceil() as u64;

        let mut svrg_units = 0.0;
        let mut saga_units = 0.0;
        let mut reached = true;
        for &seed in seeds {
            let mut cfg = SvrgConfig::new(eta, m, epochs_cap, dist.clone(), seed);
            cfg.stop_below = Some(eps_abs);
            cfg.record_inner_every = Some((n as u64 / 16).max(1));
            let trace = prox_svrg(&problem, &cfg)?;
            match complexity_to_eps(&trace, eps_abs) {
                Some(u) => svrg_units += u as f64,
                None => {
                    reached = false;
                    svrg_units += trace.last().map(|p| p.grad_units).unwrap_or(0) as f64;
                }
            }

            let mut cfg = SagaConfig::new(dist.clone(), saga_cap, seed);
            cfg.record_every = (n as u64 / 16).max(1);
            cfg.stop_below = Some(eps_abs);
            let trace = saga(&problem, &cfg)?;
            match complexity_to_eps(&trace, eps_abs) {
                Some(u) => saga_units += u as f64,
                None => {
                    reached = false;
                    saga_units += trace.last().map(|p| p.grad_units).unwrap_or(0) as f64;
                }
            }
        }
        let k_svrg = (svrg_units / seeds.len() as f64).round().max(1.0) as u64;
        let k_saga = (saga_units / seeds.len() as f64).round().max(1.0) as u64;
        rows.push(SpeedupRow {
            n,
            kappa,
            eps: eps_rel,
            k_svrg,
            k_saga,
            ratio: k_saga as f64 / k_svrg as f64,
            reached,
        });
    }
    Ok(rows)
}
