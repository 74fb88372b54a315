//! Ridge-type instance on which dual coordinate ascent contracts no faster
//! than `(1 - 2/n)` per step in expectation.
//!
//! The data matrix is `Y = c (n^2 I + J)` with `J` the all-ones matrix and
//! `c = (n^4 + 2n^2 + n)^{-1/2} (L - mu)^{1/2}`, so every column satisfies
//! `||y_i||^2 = L - mu`. The primal components
//! `f_i(x) = (x'y_i)^2 / 2 + mu ||x||^2 / 2` are `L`-smooth and
//! `mu`-strongly convex with minimizer `x* = 0`.

use crate::error::{Error, Result};
use crate::problem::FiniteSumProblem;

/// Structured access to `Y = c (n^2 I + J)` plus the instance constants.
#[derive(Debug, Clone)]
pub struct SdcaInstance {
    n: usize,
    l: f64,
    mu: f64,
    c: f64,
}

/// Builds the instance; requires `L > mu > 0` and `n > 2`.
pub fn sdca_adversarial(n: usize, l: f64, mu: f64) -> Result<SdcaInstance> {
    if n <= 2 {
        return Err(Error::invalid(format!("n must be > 2, got {n}")));
    }
    if !(mu > 0.0) || !(l > mu) {
        return Err(Error::invalid(format!(
            "need L > mu > 0, got L = {l}, mu = {mu}"
        )));
    }
    let nf = n as f64;
    let c = ((l - mu) / (nf.powi(4) + 2.0 * nf * nf + nf)).sqrt();
    Ok(SdcaInstance { n, l, mu, c })
}

impl SdcaInstance {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Regularization weight of the dual problem (`lambda = mu`).
    pub fn lambda(&self) -> f64 {
        self.mu
    }

    pub fn scale(&self) -> f64 {
        self.c
    }

    /// `||y_i||^2 = c^2 ((n^2+1)^2 + n - 1) = L - mu`, identical for all i.
    pub fn column_norm_sq(&self) -> f64 {
        let nf = self.n as f64;
        self.c * self.c * (nf.powi(4) + 2.0 * nf * nf + nf)
    }

    /// Column `y_i = c (n^2 e_i + 1)`.
    pub fn column(&self, i: usize) -> Vec<f64> {
        let nf = self.n as f64;
        let mut y = vec![self.c; self.n];
        y[i] += self.c * nf * nf;
        y
    }

    /// `x' y_i` in O(1) given `sum(x)`.
    pub fn column_dot(&self, i: usize, x: &[f64], x_sum: f64) -> f64 {
        let nf = self.n as f64;
        self.c * (nf * nf * x[i] + x_sum)
    }

    /// `Y v` using the `n^2 I + J` structure, in O(n).
    pub fn y_apply(&self, v: &[f64], out: &mut [f64]) {
        let nf = self.n as f64;
        let s: f64 = v.iter().sum();
        for (o, vi) in out.iter_mut().zip(v) {
            *o = self.c * (nf * nf * vi + s);
        }
    }

    /// The primal finite-sum view with known minimizer `x* = 0`.
    pub fn as_problem(&self) -> FiniteSumProblem {
        let inst = self.clone();
        let grad_inst = self.clone();
        let value_inst = self.clone();
        let comp_inst = self.clone();
        let n = self.n;
        let mu = self.mu;

        let smooth = move |x: &[f64]| {
            let mut yx = vec![0.0; n];
            value_inst.y_apply(x, &mut yx);
            let quad: f64 = yx.iter().map(|v| v * v).sum();
            let sq: f64 = x.iter().map(|v| v * v).sum();
            quad / (2.0 * n as f64) + 0.5 * mu * sq
        };
        let smooth_for_subopt = smooth.clone();

        FiniteSumProblem::builder(n, n)
            .component_grad(move |i, x, out| {
                let s: f64 = x.iter().sum();
                let dot = grad_inst.column_dot(i, x, s);
                let nf = n as f64;
                let c = grad_inst.c;
                for (j, o) in out.iter_mut().enumerate() {
                    let yij = if j == i { c * (nf * nf + 1.0) } else { c };
                    *o = dot * yij + mu * x[j];
                }
            })
            .smooth_value(smooth)
            .component_value(move |i, x| {
                let s: f64 = x.iter().sum();
                let dot = comp_inst.column_dot(i, x, s);
                let sq: f64 = x.iter().map(|v| v * v).sum();
                0.5 * dot * dot + 0.5 * mu * sq
            })
            .full_grad(move |x, out| {
                // (1/n) Y (Y x) + mu x, exploiting Y symmetry.
                let mut yx = vec![0.0; n];
                inst.y_apply(x, &mut yx);
                let mut yyx = vec![0.0; n];
                inst.y_apply(&yx, &mut yyx);
                let nf = n as f64;
                for j in 0..n {
                    out[j] = yyx[j] / nf + mu * x[j];
                }
            })
            .suboptimality_oracle(move |x| smooth_for_subopt(x))
            .smooth_constants(vec![self.l; n])
            .lipschitz(self.l)
            .strong_convexity(mu)
            .known_minimizer(vec![0.0; n], Some(0.0))
            .descriptor(format!("sdca(n={n},L={},mu={mu})", self.l))
            .build()
            .expect("sdca instance parameters are validated")
    }
}

/// Eigenvalue of the expected dual-update operator on the all-ones vector:
/// `theta = (1 - 1/n) - ((c^2 + 2 c^2 n)/(c^2 n^3 + 2 c^2 n + c^2 + mu)) (n-1)/n`.
/// Satisfies `theta >= 1 - 2/n` for `n > 2`.
pub fn sdca_expectation_eigenvalue(n: usize, l: f64, mu: f64) -> Result<f64> {
    let inst = sdca_adversarial(n, l, mu)?;
    let nf = n as f64;
    let c2 = inst.c * inst.c;
    let ratio = (c2 + 2.0 * c2 * nf) / (c2 * nf.powi(3) + 2.0 * c2 * nf + c2 + mu);
    Ok((1.0 - 1.0 / nf) - ratio * (nf - 1.0) / nf)
}
