//! Builds instances from a spec and executes the requested runs.

use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;

use spanbreaker::adversarial::{
    block_adversarial, nesterov_chain, nonconvex_quadratic_sum, sdca_adversarial, SdcaInstance,
};
use spanbreaker::harness::{default_window, estimate_rate_series, mean_suboptimality_by_epoch};
use spanbreaker::problem::{
    effective_condition_number, effective_lipschitz, importance_distribution,
    nonconvex_importance_distribution, second_moment_lipschitz, FiniteSumProblem,
    SamplingDistribution,
};
use spanbreaker::solvers::{
    gradient_descent_observed, nonconvex_svrg_params, optimal_rate_bound, optimal_svrg_params,
    prox_svrg, saga, sarah, sdca_with, svrg_rate_bound, EpochMode, GdConfig, NoopObserver,
    SagaConfig, SdcaConfig, SvrgConfig,
};
use spanbreaker::Trace;

use crate::spec::{ParamsSpec, ProblemSpec, RunSpec};

pub struct BuiltProblem {
    pub problem: FiniteSumProblem,
    pub sdca: Option<SdcaInstance>,
}

pub fn build_problem(spec: &ProblemSpec) -> Result<BuiltProblem> {
    let built = match spec.kind.as_str() {
        "chain" => BuiltProblem {
            problem: nesterov_chain(spec.l.unwrap(), spec.sigma.unwrap(), spec.d.unwrap())?,
            sdca: None,
        },
        "block" => BuiltProblem {
            problem: block_adversarial(
                spec.n.unwrap(),
                spec.l.unwrap(),
                spec.sigma.unwrap(),
                spec.d_b.unwrap(),
            )?,
            sdca: None,
        },
        "sdca" => {
            let inst = sdca_adversarial(spec.n.unwrap(), spec.l.unwrap(), spec.mu.unwrap())?;
            BuiltProblem {
                problem: inst.as_problem(),
                sdca: Some(inst),
            }
        }
        "ncvx" => BuiltProblem {
            problem: nonconvex_quadratic_sum(
                spec.n.unwrap(),
                spec.d.unwrap(),
                spec.mu.unwrap(),
                spec.l.unwrap(),
                spec.spread.unwrap(),
                spec.seed.unwrap_or(0),
            )?
            .into_problem(),
            sdca: None,
        },
        other => bail!("unknown problem kind {other:?}"),
    };
    Ok(built)
}

/// Fully resolved solver parameters for reporting and execution.
pub struct ResolvedParams {
    pub dist: SamplingDistribution,
    pub eta: f64,
    /// Expected epoch length, for the epoch-structured solvers.
    pub m: Option<f64>,
    pub epoch_mode: EpochMode,
    /// Guaranteed per-epoch rate for svrg/sarah when the step qualifies.
    pub rate_bound: Option<f64>,
    /// Contraction bound of the optimal parameter choice.
    pub optimal_bound: Option<f64>,
}

pub fn resolve_params(spec: &RunSpec, built: &BuiltProblem) -> Result<ResolvedParams> {
    let problem = &built.problem;
    let n = problem.n();
    let solver = spec.solver.name.as_str();
    let is_ncvx = spec.problem.kind == "ncvx";

    let explicit = match &spec.solver.params {
        ParamsSpec::Named(_) => None,
        ParamsSpec::Explicit(p) => Some(p.clone()),
    };

    let dist = match explicit.as_ref().and_then(|p| p.p.as_deref()) {
        Some("importance") => {
            if is_ncvx && solver == "svrg" {
                nonconvex_importance_distribution(problem)?
            } else {
                importance_distribution(problem)?
            }
        }
        Some(_) | None => match &spec.solver.params {
            // "auto" uses the optimal distribution for the setting.
            ParamsSpec::Named(_) if is_ncvx => nonconvex_importance_distribution(problem)?,
            ParamsSpec::Named(_) => importance_distribution(problem)?,
            _ => SamplingDistribution::uniform(n),
        },
    };

    let l_q = effective_lipschitz(problem, &dist)?;
    let kappa_q = effective_condition_number(problem, &dist)?;

    let epoch_mode = match explicit.as_ref().and_then(|p| p.epoch_mode.as_deref()) {
        Some("fixed") => EpochMode::Fixed,
        _ => EpochMode::Geometric,
    };

    let (eta, m) = match (solver, &spec.solver.params) {
        ("svrg", ParamsSpec::Named(_)) if is_ncvx => {
            let lbar = second_moment_lipschitz(problem, &dist)?;
            let m = n as f64;
            let params = nonconvex_svrg_params(n, problem.lipschitz(), lbar, problem.mu(), m)?;
            (params.eta, Some(m))
        }
        ("svrg" | "sarah", ParamsSpec::Named(_)) => {
            let (m, eta) = optimal_svrg_params(n, kappa_q, l_q)?;
            (eta, Some(m))
        }
        ("svrg" | "sarah", ParamsSpec::Explicit(p)) => (
            p.eta.ok_or_else(|| anyhow!("{solver} needs eta"))?,
            Some(p.m.ok_or_else(|| anyhow!("{solver} needs m"))?),
        ),
        ("saga", _) => {
            let eta = explicit
                .as_ref()
                .and_then(|p| p.eta)
                .unwrap_or(1.0 / (3.0 * l_q));
            (eta, None)
        }
        ("gd", _) => {
            let eta = explicit
                .as_ref()
                .and_then(|p| p.eta)
                .unwrap_or(1.0 / problem.lipschitz());
            (eta, None)
        }
        ("sdca", _) => (0.0, None),
        _ => bail!("unknown solver {solver:?}"),
    };

    let rate_bound = match (solver, m) {
        ("svrg" | "sarah", Some(m)) => svrg_rate_bound(problem.mu(), eta, m, l_q).ok(),
        _ => None,
    };
    let optimal_bound = match solver {
        "svrg" | "sarah" => Some(optimal_rate_bound(n, kappa_q)),
        _ => None,
    };

    Ok(ResolvedParams {
        dist,
        eta,
        m,
        epoch_mode,
        rate_bound,
        optimal_bound,
    })
}

/// Executes all seeds of the spec. Traces come back ordered by seed.
pub fn run_spec(spec: &RunSpec, debug_epochs: bool) -> Result<Vec<Trace>> {
    let built = build_problem(&spec.problem)?;
    let params = resolve_params(spec, &built)?;
    let solver = spec.solver.name.clone();
    let n = built.problem.n() as u64;

    let traces: Result<Vec<Trace>> = spec
        .seeds
        .par_iter()
        .map(|&seed| run_one(spec, &built, &params, &solver, n, seed, debug_epochs))
        .collect();
    traces
}

fn run_one(
    spec: &RunSpec,
    built: &BuiltProblem,
    params: &ResolvedParams,
    solver: &str,
    n: u64,
    seed: u64,
    debug_epochs: bool,
) -> Result<Trace> {
    let problem = &built.problem;
    let budget = &spec.budget;
    let trace = match solver {
        "svrg" | "sarah" => {
            let mut cfg = SvrgConfig::new(
                params.eta,
                params.m.unwrap(),
                budget.epochs.unwrap_or(u64::MAX).min(usize::MAX as u64) as usize,
                params.dist.clone(),
                seed,
            );
            cfg.epoch_mode = params.epoch_mode;
            cfg.epoch_length_log = debug_epochs;
            if let Some(units) = budget.grad_units {
                cfg.grad_unit_cap = Some(units);
                cfg.epochs = usize::MAX;
            }
            if solver == "svrg" {
                prox_svrg(problem, &cfg)?
            } else {
                sarah(problem, &cfg)?
            }
        }
        "saga" => {
            let steps = budget
                .grad_units
                .unwrap_or_else(|| budget.epochs.unwrap() * n);
            let mut cfg = SagaConfig::new(params.dist.clone(), steps, seed);
            cfg.eta = Some(params.eta);
            cfg.record_every = n.max(1);
            saga(problem, &cfg)?
        }
        "gd" => {
            let iters = budget
                .epochs
                .unwrap_or_else(|| (budget.grad_units.unwrap() / n).max(1));
            let cfg = GdConfig {
                eta: params.eta,
                iters,
                x0: None,
                stop_below: None,
            };
            gradient_descent_observed(problem, &cfg, &mut NoopObserver)?
        }
        "sdca" => {
            let inst = built.sdca.as_ref().expect("validated: kind is sdca");
            let iters = budget
                .grad_units
                .unwrap_or_else(|| budget.epochs.unwrap() * n);
            let cfg = SdcaConfig {
                iters,
                seed,
                record_every: n.max(1),
                record_alpha: false,
            };
            let alpha0 = vec![1.0; inst.n()];
            sdca_with(inst, &alpha0, &cfg)?.trace
        }
        other => bail!("unknown solver {other:?}"),
    };
    Ok(trace)
}

/// Row of the `rates` report.
pub struct RateRow {
    pub solver: String,
    pub rho_hat: Option<f64>,
    pub rate_bound: Option<f64>,
    pub optimal_bound: Option<f64>,
    pub ratio: Option<f64>,
}

pub fn rates_report(spec: &RunSpec, debug_epochs: bool) -> Result<RateRow> {
    let built = build_problem(&spec.problem)?;
    let params = resolve_params(spec, &built)?;
    let traces = run_spec(spec, debug_epochs)?;
    let mean = mean_suboptimality_by_epoch(&traces);
    let window = default_window(&traces[0]);
    let rho_hat = estimate_rate_series(&mean, window).ok().map(|e| e.rho_hat);
    let ratio = match (rho_hat, params.optimal_bound) {
        (Some(r), Some(b)) => Some(r / b),
        _ => None,
    };
    Ok(RateRow {
        solver: spec.solver.name.clone(),
        rho_hat,
        rate_bound: params.rate_bound,
        optimal_bound: params.optimal_bound,
        ratio,
    })
}
