//! Step-size and epoch-length selectors with their guaranteed rates.

use crate::error::{Error, Result};

/// Epoch length and step size minimizing the variance-reduced epoch
/// complexity for a problem with effective condition number `kappa_Q`:
/// `m = n + 121 kappa_Q` and `eta = sqrt(kappa_Q / m) / (2 L_Q)`.
///
/// The returned step always satisfies `eta <= 1/(22 L_Q)`.
pub fn optimal_svrg_params(n: usize, kappa_q: f64, l_q: f64) -> Result<(f64, f64)> {
    if !(kappa_q > 0.0) || !(l_q > 0.0) {
        return Err(Error::invalid("kappa_Q and L_Q must be positive"));
    }
    let m = n as f64 + 121.0 * kappa_q;
    let eta = (kappa_q / m).sqrt() / (2.0 * l_q);
    Ok((m, eta))
}

/// Per-epoch contraction factor guaranteed for proximal SVRG with step `eta`
/// and expected epoch length `m`:
///
/// ```text
/// rho = (1 + mu*eta*(1 + 4*m*L_Q*eta)) / (mu*eta*m*(1 - 4*L_Q*eta))
/// ```
///
/// Requires `eta < 1/(4 L_Q)` for the denominator to stay positive.
pub fn svrg_rate_bound(mu: f64, eta: f64, m: f64, l_q: f64) -> Result<f64> {
    if !(mu > 0.0) || !(eta > 0.0) || !(m >= 1.0) || !(l_q > 0.0) {
        return Err(Error::invalid("rate bound needs positive mu, eta, m, L_Q"));
    }
    if eta >= 1.0 / (4.0 * l_q) {
        return Err(Error::invalid(format!(
            "rate bound undefined for eta = {eta} >= 1/(4 L_Q) = {}",
            1.0 / (4.0 * l_q)
        )));
    }
    Ok((1.0 + mu * eta * (1.0 + 4.0 * m * l_q * eta)) / (mu * eta * m * (1.0 - 4.0 * l_q * eta)))
}

/// Contraction bound `sqrt(100 / (121 + n/kappa_Q))` attained by
/// [`optimal_svrg_params`]; tends to zero as `n / kappa_Q` grows.
pub fn optimal_rate_bound(n: usize, kappa_q: f64) -> f64 {
    (100.0 / (121.0 + n as f64 / kappa_q)).sqrt()
}

/// Step size for possibly nonconvex components, with the resulting
/// per-epoch contraction prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonconvexParams {
    /// `eta = min(1/L, 1/(Lbar sqrt(m))) / 2`.
    pub eta: f64,
    /// `tau = m * eta * mu / 2`.
    pub tau: f64,
    /// `rho = 1 / (1 + tau)`.
    pub rho: f64,
}

/// Selects the nonconvex-safe step size given the second-moment constant
/// `lbar` and epoch length `m`.
pub fn nonconvex_svrg_params(
    n: usize,
    l: f64,
    lbar: f64,
    mu: f64,
    m: f64,
) -> Result<NonconvexParams> {
    if n == 0 || !(l > 0.0) || !(lbar > 0.0) || !(mu > 0.0) || !(m >= 1.0) {
        return Err(Error::invalid(
            "nonconvex params need positive n, L, Lbar, mu and m >= 1",
        ));
    }
    let eta = 0.5 * (1.0 / l).min(1.0 / (lbar * m.sqrt()));
    let tau = 0.5 * m * eta * mu;
    Ok(NonconvexParams {
        eta,
        tau,
        rho: 1.0 / (1.0 + tau),
    })
}
