//! Independent oracles used by tests: elimination solves, finite differences,
//! and exact expectation recursions for the dual coordinate method.

use crate::adversarial::SdcaInstance;
use crate::error::{Error, Result};
use crate::problem::FiniteSumProblem;
use crate::solvers::{sdca_coordinate_step, DualState};

/// Thomas elimination for a symmetric tridiagonal system with constant
/// off-diagonal: `(diag_j on the diagonal, off on both bands) y = rhs`.
pub fn tridiagonal_solve(diag: &[f64], off: f64, rhs: &[f64]) -> Vec<f64> {
    let d = diag.len();
    assert_eq!(rhs.len(), d);
    let mut c = vec![0.0; d];
    let mut y = rhs.to_vec();
    let mut denom = diag[0];
    c[0] = off / denom;
    y[0] /= denom;
    for j in 1..d {
        denom = diag[j] - off * c[j - 1];
        c[j] = off / denom;
        y[j] = (y[j] - off * y[j - 1]) / denom;
    }
    for j in (0..d.saturating_sub(1)).rev() {
        let next = y[j + 1];
        y[j] -= c[j] * next;
    }
    y
}

/// Exact minimizer of one chain block: solves
/// `((l - sigma)/4 * A + shift * I) y = (l - sigma)/4 * e_1` where `shift` is
/// the strong-convexity coefficient of the block (sigma for the single chain,
/// sigma * n for the n-block instance).
pub fn chain_block_exact_minimizer(l: f64, sigma: f64, shift: f64, d: usize) -> Vec<f64> {
    let beta = (l - sigma) / 4.0;
    let diag = vec![2.0 * beta + shift; d];
    let mut rhs = vec![0.0; d];
    rhs[0] = beta;
    tridiagonal_solve(&diag, -beta, &rhs)
}

/// Central-difference gradient of component `i` (step `h` per coordinate).
/// Requires the problem to expose component values.
pub fn central_diff_component_grad(
    problem: &FiniteSumProblem,
    i: usize,
    x: &[f64],
    h: f64,
) -> Result<Vec<f64>> {
    if !problem.has_component_values() {
        return Err(Error::Unsupported(
            "finite differences need component value oracles".into(),
        ));
    }
    let mut out = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        let orig = xp[j];
        xp[j] = orig + h;
        let fp = problem.component_value(i, &xp).unwrap();
        xp[j] = orig - h;
        let fm = problem.component_value(i, &xp).unwrap();
        xp[j] = orig;
        out[j] = (fp - fm) / (2.0 * h);
    }
    Ok(out)
}

/// Worst relative error of the analytic component gradients against central
/// finite differences over the given points.
pub fn max_component_grad_rel_error(
    problem: &FiniteSumProblem,
    points: &[Vec<f64>],
    h: f64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut g = vec![0.0; problem.dim()];
    for x in points {
        for i in 0..problem.n() {
            problem.component_grad_into(i, x, &mut g);
            let fd = central_diff_component_grad(problem, i, x, h)?;
            let num: f64 = fd
                .iter()
                .zip(&g)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let den = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
            worst = worst.max(num / den);
        }
    }
    Ok(worst)
}

/// One application of the expected dual-update operator
/// `T = (1 - 1/n) I - ratio * (J - I)/n` in O(n).
pub fn sdca_expectation_step(instance: &SdcaInstance, alpha: &[f64]) -> Vec<f64> {
    let n = instance.n() as f64;
    let c2 = instance.scale() * instance.scale();
    let mu = instance.mu();
    let ratio = (c2 + 2.0 * c2 * n) / (c2 * n.powi(3) + 2.0 * c2 * n + c2 + mu);
    let sum: f64 = alpha.iter().sum();
    alpha
        .iter()
        .map(|&a| (1.0 - 1.0 / n) * a - ratio * (sum - a) / n)
        .collect()
}

/// Dense assembly of the expectation operator, for cross-checks at small n.
pub fn sdca_expectation_operator(instance: &SdcaInstance) -> Vec<Vec<f64>> {
    let n = instance.n();
    let mut t = vec![vec![0.0; n]; n];
    for c in 0..n {
        let mut e = vec![0.0; n];
        e[c] = 1.0;
        let col = sdca_expectation_step(instance, &e);
        for (r, v) in col.into_iter().enumerate() {
            t[r][c] = v;
        }
    }
    t
}

/// Exact mean of the dual vector after `k` uniformly sampled coordinate
/// steps, by enumerating all `n^k` index sequences with the solver's own
/// coordinate update.
pub fn sdca_enumerated_mean(instance: &SdcaInstance, alpha0: &[f64], k: u32) -> Result<Vec<f64>> {
    let n = instance.n();
    let mut states: Vec<Vec<f64>> = vec![alpha0.to_vec()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(states.len() * n);
        for alpha in &states {
            for i in 0..n {
                let mut st = DualState::new(instance, alpha.clone())?;
                sdca_coordinate_step(instance, &mut st, i);
                next.push(st.alpha);
            }
        }
        states = next;
    }
    let total = states.len() as f64;
    let mut mean = vec![0.0; n];
    for alpha in &states {
        for (m, a) in mean.iter_mut().zip(alpha) {
            *m += a;
        }
    }
    for m in mean.iter_mut() {
        *m /= total;
    }
    Ok(mean)
}
