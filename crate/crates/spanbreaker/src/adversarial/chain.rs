//! Worst-case tridiagonal quadratics.
//!
//! The building block is the classical chain quadratic
//! `phi(x) = (L - sigma)/4 * (x'Ax/2 - x_1)` with `A` tridiagonal
//! (2 on the diagonal, -1 off it). Adding `sigma/2 ||x||^2` makes it
//! `L`-smooth and `sigma`-strongly convex, and its minimizer decays
//! geometrically along the chain. Gradients only propagate support one
//! coordinate per touch, which is what makes these instances hard for
//! methods whose iterates stay in the span of sampled component gradients.
//!
//! The n-block variant puts one chain on each of `n` coordinate blocks and
//! couples them through the strong-convexity term:
//! `f(x) = sum_i (phi(x_i) + sigma/2 ||x||^2)`.

use crate::error::{Error, Result};
use crate::problem::FiniteSumProblem;

/// `q` such that the infinite-chain minimizer is `(q, q^2, q^3, ...)` for the
/// per-block effective condition ratio `r = (kappa - 1)/n + 1`.
fn q_from_ratio(r: f64) -> f64 {
    let s = r.sqrt();
    (s - 1.0) / (s + 1.0)
}

/// Applies the tridiagonal stencil `(Av)_j = 2 v_j - v_{j-1} - v_{j+1}`.
fn tridiag_apply(v: &[f64], out: &mut [f64]) {
    let d = v.len();
    for j in 0..d {
        let left = if j > 0 { v[j - 1] } else { 0.0 };
        let right = if j + 1 < d { v[j + 1] } else { 0.0 };
        out[j] = 2.0 * v[j] - left - right;
    }
}

/// `x' A x / 2` for the tridiagonal stencil, in one pass.
fn tridiag_quadratic(v: &[f64]) -> f64 {
    let d = v.len();
    let mut acc = 0.0;
    for j in 0..d {
        let right = if j + 1 < d { v[j + 1] } else { 0.0 };
        acc += v[j] * v[j] - v[j] * right;
    }
    acc
}

/// Solves `(beta*A + shift*I) y = beta * e_1` by Thomas elimination.
///
/// This is the exact finite-dimensional minimizer of one chain block; the
/// geometric formula `(q, q^2, ...)` matches it up to `O(q^d)` truncation.
pub(crate) fn exact_block_minimizer(beta: f64, shift: f64, d: usize) -> Vec<f64> {
    let diag = 2.0 * beta + shift;
    let off = -beta;
    let mut c = vec![0.0; d];
    let mut rhs = vec![0.0; d];
    rhs[0] = beta;
    // Forward sweep.
    let mut denom = diag;
    c[0] = off / denom;
    rhs[0] /= denom;
    for j in 1..d {
        denom = diag - off * c[j - 1];
        c[j] = off / denom;
        rhs[j] = (rhs[j] - off * rhs[j - 1]) / denom;
    }
    // Back substitution.
    let mut y = rhs;
    for j in (0..d - 1).rev() {
        let next = y[j + 1];
        y[j] -= c[j] * next;
    }
    y
}

/// Minimizer formula `(q1, q1^2, ..., q1^d)` of the single chain, with
/// `q1 = (sqrt(kappa) - 1)/(sqrt(kappa) + 1)`.
pub fn chain_minimizer(kappa: f64, d: usize) -> Result<Vec<f64>> {
    block_minimizer(1, kappa, d)
}

/// Minimizer formula `(q_n, q_n^2, ..., q_n^{d_b})` of one block of the
/// n-block instance, with `q_n = (sqrt(r) - 1)/(sqrt(r) + 1)` for
/// `r = (kappa - 1)/n + 1`.
pub fn block_minimizer(n: usize, kappa: f64, d_b: usize) -> Result<Vec<f64>> {
    if kappa < 1.0 {
        return Err(Error::invalid(format!("kappa must be >= 1, got {kappa}")));
    }
    if n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    let q = q_from_ratio((kappa - 1.0) / n as f64 + 1.0);
    let mut out = Vec::with_capacity(d_b);
    let mut p = 1.0;
    for _ in 0..d_b {
        p *= q;
        out.push(p);
    }
    Ok(out)
}

/// The `q_n` decay factor of the n-block instance.
pub fn block_q(n: usize, kappa: f64) -> f64 {
    q_from_ratio((kappa - 1.0) / n as f64 + 1.0)
}

/// Single-chain instance: one component `f_1(x) = phi(x) + sigma/2 ||x||^2`
/// on dimension `d`, `L`-smooth and `sigma`-strongly convex.
pub fn nesterov_chain(l: f64, sigma: f64, d: usize) -> Result<FiniteSumProblem> {
    block_adversarial(1, l, sigma, d)
}

/// n-component block instance on dimension `n * d_b`.
///
/// Stored components are `n * (phi(x_i) + sigma/2 ||x||^2)` so that the
/// averaged objective equals `sum_i (phi(x_i) + sigma/2 ||x||^2)` exactly.
/// Consequently each component is `n*L`-smooth, the objective is
/// `sigma*n`-strongly convex, and the effective condition number under
/// uniform sampling is `L/sigma`.
pub fn block_adversarial(n: usize, l: f64, sigma: f64, d_b: usize) -> Result<FiniteSumProblem> {
    if n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    if d_b < 2 {
        return Err(Error::invalid(format!("d_b must be >= 2, got {d_b}")));
    }
    if !(sigma > 0.0) || !(l > sigma) {
        return Err(Error::invalid(format!(
            "need l > sigma > 0, got l = {l}, sigma = {sigma}"
        )));
    }
    let d = n * d_b;
    let beta = (l - sigma) / 4.0;
    let nf = n as f64;
    let mu = sigma * nf;
    let l_total = (l - sigma) + sigma * nf;
    let kappa = l / sigma;

    // Exact per-block minimizer; identical for every block.
    let y_exact = exact_block_minimizer(beta, mu, d_b);
    let mut x_star = Vec::with_capacity(d);
    for _ in 0..n {
        x_star.extend_from_slice(&y_exact);
    }
    // Quadratic minimum value: -b'y*/2 per block with b = beta*e_1.
    let f_star = -0.5 * nf * beta * y_exact[0];

    let grad_y = y_exact.clone();
    let grad = move |i: usize, x: &[f64], out: &mut [f64]| {
        let scale = nf * sigma;
        for (o, v) in out.iter_mut().zip(x) {
            *o = scale * v;
        }
        let block = &x[i * d_b..(i + 1) * d_b];
        let ob = &mut out[i * d_b..(i + 1) * d_b];
        for j in 0..d_b {
            let left = if j > 0 { block[j - 1] } else { 0.0 };
            let right = if j + 1 < d_b { block[j + 1] } else { 0.0 };
            ob[j] += nf * beta * (2.0 * block[j] - left - right);
        }
        ob[0] -= nf * beta;
    };

    let smooth = move |x: &[f64]| {
        let mut acc = 0.0;
        let mut sq = 0.0;
        for i in 0..n {
            let b = &x[i * d_b..(i + 1) * d_b];
            acc += beta * (tridiag_quadratic(b) - b[0]);
            sq += b.iter().map(|v| v * v).sum::<f64>();
        }
        acc + 0.5 * mu * sq
    };

    let comp_value = move |i: usize, x: &[f64]| {
        let b = &x[i * d_b..(i + 1) * d_b];
        let sq = x.iter().map(|v| v * v).sum::<f64>();
        nf * (beta * (tridiag_quadratic(b) - b[0]) + 0.5 * sigma * sq)
    };

    let fg = move |x: &[f64], out: &mut [f64]| {
        for i in 0..n {
            let b = &x[i * d_b..(i + 1) * d_b];
            let ob = &mut out[i * d_b..(i + 1) * d_b];
            tridiag_apply(b, ob);
            for j in 0..d_b {
                ob[j] = beta * ob[j] + mu * b[j];
            }
            ob[0] -= beta;
        }
    };

    // Stable suboptimality: the quadratic form around the exact minimizer,
    // evaluated block-wise with the tridiagonal stencil.
    let subopt = move |x: &[f64]| {
        let mut acc = 0.0;
        let mut diff = vec![0.0; d_b];
        for i in 0..n {
            let b = &x[i * d_b..(i + 1) * d_b];
            for j in 0..d_b {
                diff[j] = b[j] - grad_y[j];
            }
            let mut quad = 0.0;
            for j in 0..d_b {
                let left = if j > 0 { diff[j - 1] } else { 0.0 };
                let right = if j + 1 < d_b { diff[j + 1] } else { 0.0 };
                quad += diff[j] * (beta * (2.0 * diff[j] - left - right) + mu * diff[j]);
            }
            acc += 0.5 * quad;
        }
        acc
    };

    FiniteSumProblem::builder(n, d)
        .component_grad(grad)
        .smooth_value(smooth)
        .component_value(comp_value)
        .full_grad(fg)
        .suboptimality_oracle(subopt)
        .smooth_constants(vec![nf * l; n])
        .lipschitz(l_total)
        .strong_convexity(mu)
        .known_minimizer(x_star, Some(f_star))
        .descriptor(if n == 1 {
            format!("chain(L={l},sigma={sigma},d={d_b})")
        } else {
            format!("block(n={n},L={l},sigma={sigma},d_b={d_b},kappa={kappa})")
        })
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::full_grad;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn chain_minimizer_formula() {
        let m = chain_minimizer(4.0, 3).unwrap();
        let e = [1.0 / 3.0, 1.0 / 9.0, 1.0 / 27.0];
        for (a, b) in m.iter().zip(&e) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(chain_minimizer(1.0, 4).unwrap(), vec![0.0; 4]);
        let m = chain_minimizer(9.0, 2).unwrap();
        assert!((m[0] - 0.5).abs() < 1e-15 && (m[1] - 0.25).abs() < 1e-15);
        assert!(chain_minimizer(0.5, 2).is_err());
        // q1 -> 0 as kappa -> 1+.
        assert!(chain_minimizer(1.0 + 1e-12, 2).unwrap()[0] < 1e-6);
    }

    #[test]
    fn block_minimizer_formula() {
        let m = block_minimizer(25, 76.0, 2).unwrap();
        assert!((m[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((m[1] - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(block_minimizer(7, 1.0, 3).unwrap(), vec![0.0; 3]);
        // n = 1 coincides with the chain formula.
        assert_eq!(
            block_minimizer(1, 5.0, 4).unwrap(),
            chain_minimizer(5.0, 4).unwrap()
        );
    }

    #[test]
    fn chain_gradient_at_origin() {
        let p = nesterov_chain(4.0, 1.0, 8).unwrap();
        let g = full_grad(&p, &[0.0; 8]).unwrap();
        assert!((g[0] + 0.75).abs() < 1e-15);
        assert!(g[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn chain_rejects_bad_parameters() {
        assert!(nesterov_chain(1.0, 1.0, 8).is_err());
        assert!(nesterov_chain(0.5, 1.0, 8).is_err());
        assert!(block_adversarial(4, 2.0, 1.0, 1).is_err());
    }

    /// The formula minimizer is near-stationary; the residual lives on the
    /// last coordinate and scales like q^(d+1). At d = 64 and kappa = 4 that
    /// is far below the f64 evaluation floor, so the check bottoms out there.
    #[test]
    fn chain_formula_minimizer_residual() {
        for (d, q_tol) in [(8usize, 10.0 * (1.0f64 / 3.0).powi(8)), (64, 0.0)] {
            let p = nesterov_chain(4.0, 1.0, d).unwrap();
            let x = chain_minimizer(4.0, d).unwrap();
            let g = full_grad(&p, &x).unwrap();
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            let floor = 1e-13;
            assert!(
                norm <= q_tol.max(floor),
                "d={d}: residual {norm} above {}",
                q_tol.max(floor)
            );
        }
    }

    #[test]
    fn exact_and_formula_minimizers_agree_to_truncation() {
        let (n, kappa, d_b) = (4usize, 16.0, 12usize);
        let sigma = 1.0 / n as f64;
        let p = block_adversarial(n, kappa * sigma, sigma, d_b).unwrap();
        let formula = block_minimizer(n, kappa, d_b).unwrap();
        let q = block_q(n, kappa);
        let stored = &p.known_minimizer().unwrap().point[..d_b];
        let diff: f64 = stored
            .iter()
            .zip(&formula)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 10.0 * q.powi(d_b as i32), "diff = {diff:e}");
    }

    #[test]
    fn single_block_reduces_to_chain() {
        let (l, sigma, d) = (4.0, 1.0, 6);
        let chain = nesterov_chain(l, sigma, d).unwrap();
        let block = block_adversarial(1, l, sigma, d).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            assert!((chain.objective(&x) - block.objective(&x)).abs() < 1e-12);
            let gc = full_grad(&chain, &x).unwrap();
            let gb = full_grad(&block, &x).unwrap();
            for (a, b) in gc.iter().zip(&gb) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn component_gradient_supported_on_own_block_first_coord_at_origin() {
        let (n, d_b) = (4usize, 3usize);
        let p = block_adversarial(n, 4.0, 1.0, d_b).unwrap();
        let x = vec![0.0; n * d_b];
        for i in 0..n {
            let g = p.component_grad(i, &x);
            for (j, v) in g.iter().enumerate() {
                if j == i * d_b {
                    assert!(*v != 0.0);
                } else {
                    assert_eq!(*v, 0.0);
                }
            }
        }
    }

    #[test]
    fn minimizer_blocks_match_formula_example() {
        // (kappa - 1)/n = 3, so q_n = 1/3.
        let (n, kappa, d_b) = (25usize, 76.0, 4usize);
        let sigma = 0.1;
        let p = block_adversarial(n, kappa * sigma, sigma, d_b).unwrap();
        let x_star = &p.known_minimizer().unwrap().point;
        let formula = block_minimizer(n, kappa, d_b).unwrap();
        for i in 0..n {
            for j in 0..d_b {
                assert!(
                    (x_star[i * d_b + j] - formula[j]).abs()
                        < 2.0 * (1.0f64 / 3.0).powi(d_b as i32),
                    "block {i} coord {j}"
                );
            }
        }
    }

    #[test]
    fn objective_at_exact_minimizer_matches_closed_form() {
        let (n, d_b) = (5usize, 7usize);
        let (l, sigma) = (3.0, 0.5);
        let p = block_adversarial(n, l, sigma, d_b).unwrap();
        let m = p.known_minimizer().unwrap();
        let val = p.objective(&m.point);
        // Closed form -n * beta * y1 / 2 against the tridiagonal solve.
        let beta = (l - sigma) / 4.0;
        let y = exact_block_minimizer(beta, sigma * n as f64, d_b);
        let closed = -0.5 * n as f64 * beta * y[0];
        assert!((val - closed).abs() <= 1e-10 * closed.abs());
        assert!((m.value - closed).abs() <= 1e-12 * closed.abs());
    }

    #[test]
    fn suboptimality_oracle_matches_objective_difference() {
        let p = block_adversarial(3, 4.0, 1.0, 5).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        let m = p.known_minimizer().unwrap().clone();
        for _ in 0..10 {
            let x: Vec<f64> = (0..p.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let direct = p.objective(&x) - m.value;
            let oracle = p.suboptimality(&x).unwrap();
            assert!(
                (direct - oracle).abs() <= 1e-10 * direct.abs().max(1.0),
                "direct {direct} vs oracle {oracle}"
            );
            assert!(oracle >= 0.0);
        }
    }
}
