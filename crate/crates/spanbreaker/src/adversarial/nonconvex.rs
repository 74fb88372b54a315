//! Random quadratic sums with possibly indefinite components.
//!
//! Components are `f_i(x) = x'A_i x / 2 + b_i'x` with symmetric `A_i` whose
//! mean has spectrum inside `[mu, L]`. The deviations `Delta_i = A_i - mean`
//! come in exact `+R/-R` pairs, so the mean Hessian is controlled while the
//! individual components can be indefinite once `spread` exceeds `L`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::problem::FiniteSumProblem;

/// Generated instance plus per-component spectral diagnostics.
pub struct NonconvexSumInstance {
    problem: FiniteSumProblem,
    component_min_eigs: Vec<f64>,
    nonconvex_components: bool,
}

impl NonconvexSumInstance {
    pub fn problem(&self) -> &FiniteSumProblem {
        &self.problem
    }

    pub fn into_problem(self) -> FiniteSumProblem {
        self.problem
    }

    /// True when at least one `A_i` has a negative eigenvalue.
    pub fn nonconvex_components(&self) -> bool {
        self.nonconvex_components
    }

    /// Smallest eigenvalue of each `A_i`.
    pub fn component_min_eigs(&self) -> &[f64] {
        &self.component_min_eigs
    }
}

struct QuadData {
    d: usize,
    mats: Vec<Vec<f64>>, // row-major, one per component
    rhs: Vec<Vec<f64>>,
    a_bar: Vec<f64>,
    b_bar: Vec<f64>,
    x_star: Vec<f64>,
}

fn matvec(m: &[f64], d: usize, x: &[f64], out: &mut [f64]) {
    for r in 0..d {
        let row = &m[r * d..(r + 1) * d];
        out[r] = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
}

fn quad_form(m: &[f64], d: usize, x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for r in 0..d {
        let row = &m[r * d..(r + 1) * d];
        let mx: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
        acc += x[r] * mx;
    }
    acc
}

fn random_symmetric(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(d, d);
    for r in 0..d {
        for c in r..d {
            let v: f64 = rng.sample(StandardNormal);
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
    }
    m
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, &v| a.max(v.abs()))
}

/// Deterministic-in-seed family of `n` quadratic components on dimension `d`
/// whose average Hessian has spectrum in `[mu, L]` and whose minimizer is
/// obtained by solving the average quadratic.
pub fn nonconvex_quadratic_sum(
    n: usize,
    d: usize,
    mu: f64,
    l: f64,
    spread: f64,
    seed: u64,
) -> Result<NonconvexSumInstance> {
    if n == 0 || d < 2 {
        return Err(Error::invalid("need n >= 1 and d >= 2"));
    }
    if !(mu > 0.0) || !(l > mu) {
        return Err(Error::invalid(format!(
            "need L > mu > 0, got L = {l}, mu = {mu}"
        )));
    }
    if spread < 0.0 {
        return Err(Error::invalid("spread must be >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Mean Hessian: orthogonal conjugation of a log-uniform spectrum with the
    // endpoints pinned to mu and L exactly.
    let mut eigs = Vec::with_capacity(d);
    eigs.push(mu);
    for _ in 0..d.saturating_sub(2) {
        let t: f64 = rng.gen();
        eigs.push((mu.ln() + t * (l.ln() - mu.ln())).exp());
    }
    eigs.push(l);
    let gauss = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let q = gauss.qr().q();
    let mut a_bar = &q * DMatrix::from_diagonal(&DVector::from_vec(eigs)) * q.transpose();
    // Symmetrize away the conjugation round-off.
    for r in 0..d {
        for c in 0..r {
            let v = 0.5 * (a_bar[(r, c)] + a_bar[(c, r)]);
            a_bar[(r, c)] = v;
            a_bar[(c, r)] = v;
        }
    }

    // Deviations in +R/-R pairs sum to zero exactly.
    let mut deltas: Vec<DMatrix<f64>> = Vec::with_capacity(n);
    let mut i = 0;
    while i + 1 < n {
        let mut r = random_symmetric(d, &mut rng);
        if spread > 0.0 {
            let norm = spectral_norm(&r);
            if norm > 0.0 {
                r *= spread / norm;
            }
        } else {
            r.fill(0.0);
        }
        deltas.push(r.clone());
        deltas.push(-r);
        i += 2;
    }
    if deltas.len() < n {
        deltas.push(DMatrix::zeros(d, d));
    }

    let mut mats = Vec::with_capacity(n);
    let mut smooth_constants = Vec::with_capacity(n);
    let mut component_min_eigs = Vec::with_capacity(n);
    for delta in &deltas {
        let ai = &a_bar + delta;
        let eig = ai.clone().symmetric_eigen().eigenvalues;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in eig.iter() {
            lo = lo.min(v);
            hi = hi.max(v.abs());
        }
        smooth_constants.push(hi);
        component_min_eigs.push(lo);
        mats.push(ai.as_slice().to_vec()); // column-major == row-major (symmetric)
    }

    let rhs: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    let mut b_bar = vec![0.0; d];
    for b in &rhs {
        for (acc, v) in b_bar.iter_mut().zip(b) {
            *acc += v;
        }
    }
    for v in b_bar.iter_mut() {
        *v /= n as f64;
    }

    let chol = a_bar
        .clone()
        .cholesky()
        .ok_or_else(|| Error::invalid("mean Hessian is not positive definite"))?;
    let x_star_v = chol.solve(&DVector::from_column_slice(&b_bar)) * -1.0;
    let x_star: Vec<f64> = x_star_v.as_slice().to_vec();

    let data = Arc::new(QuadData {
        d,
        mats,
        rhs,
        a_bar: a_bar.as_slice().to_vec(),
        b_bar,
        x_star: x_star.clone(),
    });

    let f_star = 0.5 * quad_form(&data.a_bar, d, &x_star)
        + data
            .b_bar
            .iter()
            .zip(&x_star)
            .map(|(a, b)| a * b)
            .sum::<f64>();

    let g = data.clone();
    let sv = data.clone();
    let cv = data.clone();
    let fgd = data.clone();
    let so = data.clone();
    let nonconvex_components = component_min_eigs.iter().any(|&v| v < 0.0);

    let problem = FiniteSumProblem::builder(n, d)
        .component_grad(move |i, x, out| {
            matvec(&g.mats[i], g.d, x, out);
            for (o, b) in out.iter_mut().zip(&g.rhs[i]) {
                *o += b;
            }
        })
        .smooth_value(move |x| {
            0.5 * quad_form(&sv.a_bar, sv.d, x)
                + sv.b_bar.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
        })
        .component_value(move |i, x| {
            0.5 * quad_form(&cv.mats[i], cv.d, x)
                + cv.rhs[i].iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
        })
        .full_grad(move |x, out| {
            matvec(&fgd.a_bar, fgd.d, x, out);
            for (o, b) in out.iter_mut().zip(&fgd.b_bar) {
                *o += b;
            }
        })
        .suboptimality_oracle(move |x| {
            let diff: Vec<f64> = x.iter().zip(&so.x_star).map(|(a, b)| a - b).collect();
            0.5 * quad_form(&so.a_bar, so.d, &diff)
        })
        .smooth_constants(smooth_constants)
        .lipschitz(l)
        .strong_convexity(mu)
        .known_minimizer(x_star, Some(f_star))
        .descriptor(format!(
            "ncvx(n={n},d={d},mu={mu},L={l},spread={spread},seed={seed})"
        ))
        .build()?;

    Ok(NonconvexSumInstance {
        problem,
        component_min_eigs,
        nonconvex_components,
    })
}
