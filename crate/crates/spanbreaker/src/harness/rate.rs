//! Empirical linear-rate estimation from suboptimality traces.

use crate::error::{Error, Result};
use crate::trace::Trace;

/// Least-squares estimate of the per-epoch contraction factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    /// `exp(slope)` of the fit of `ln(suboptimality)` against epoch index.
    pub rho_hat: f64,
    /// First and last epoch actually used.
    pub window: (u64, u64),
    /// Fit quality in `[0, 1]`.
    pub r_squared: f64,
}

/// Fits `ln(suboptimality)` against epoch over `window = (first, last)`,
/// inclusive. The window is truncated just before the first non-positive
/// suboptimality; at least three usable points are required.
pub fn estimate_rate(trace: &Trace, window: (u64, u64)) -> Result<RateEstimate> {
    estimate_rate_series(&trace.suboptimality_series(), window)
}

/// [`estimate_rate`] on a bare `(epoch, suboptimality)` series.
pub fn estimate_rate_series(series: &[(f64, f64)], window: (u64, u64)) -> Result<RateEstimate> {
    let (lo, hi) = (window.0 as f64, window.1 as f64);
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for &(epoch, s) in series {
        if epoch < lo || epoch > hi {
            continue;
        }
        if s <= 0.0 {
            break; // truncate the window before the first exact zero
        }
        pts.push((epoch, s.ln()));
    }
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "rate fit needs >= 3 positive points in [{}, {}], found {}",
            window.0,
            window.1,
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "rate fit needs at least two distinct epochs".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y) * (p.1 - mean_y)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(RateEstimate {
        rho_hat: slope.exp(),
        window: (pts[0].0 as u64, pts[pts.len() - 1].0 as u64),
        r_squared,
    })
}

/// Default fit window: the last 50% of recorded epochs, skipping transients.
pub fn default_window(trace: &Trace) -> (u64, u64) {
    let last = trace.points.last().map(|p| p.epoch).unwrap_or(0);
    (last / 2, last)
}

/// Across-seed mean of suboptimality keyed by epoch index. Epochs missing a
/// value in any trace are dropped.
pub fn mean_suboptimality_by_epoch(traces: &[Trace]) -> Vec<(f64, f64)> {
    mean_by_epoch(traces, |p| p.suboptimality)
}

/// Across-seed mean of squared distance keyed by epoch index.
pub fn mean_dist_sq_by_epoch(traces: &[Trace]) -> Vec<(f64, f64)> {
    mean_by_epoch(traces, |p| p.dist_sq)
}

fn mean_by_epoch(
    traces: &[Trace],
    field: impl Fn(&crate::trace::TracePoint) -> Option<f64>,
) -> Vec<(f64, f64)> {
    use std::collections::BTreeMap;
    let mut acc: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for t in traces {
        for p in &t.points {
            if let Some(v) = field(p) {
                let e = acc.entry(p.epoch).or_insert((0.0, 0));
                e.0 += v;
                e.1 += 1;
            }
        }
    }
    acc.into_iter()
        .filter(|(_, (_, c))| *c == traces.len())
        .map(|(k, (s, c))| (k as f64, s / c as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_geometric_sequence() {
        let series: Vec<(f64, f64)> = (0..4).map(|k| (k as f64, 0.5f64.powi(k))).collect();
        let est = estimate_rate_series(&series, (0, 3)).unwrap();
        assert!((est.rho_hat - 0.5).abs() < 1e-12);
        assert!((est.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_sequence_gives_unit_rate() {
        let series: Vec<(f64, f64)> = (0..4).map(|k| (k as f64, 1.0)).collect();
        let est = estimate_rate_series(&series, (0, 3)).unwrap();
        assert!((est.rho_hat - 1.0).abs() < 1e-12);
        assert_eq!(est.r_squared, 1.0);
    }

    #[test]
    fn window_truncates_at_zero() {
        let series = vec![(0.0, 1.0), (1.0, 0.5), (2.0, 0.25), (3.0, 0.0), (4.0, 0.1)];
        let est = estimate_rate_series(&series, (0, 4)).unwrap();
        assert_eq!(est.window, (0, 2));
        assert!((est.rho_hat - 0.5).abs() < 1e-12);
    }

    #[test]
    fn too_few_points_is_an_error() {
        let series = vec![(0.0, 1.0), (1.0, 0.5)];
        assert!(matches!(
            estimate_rate_series(&series, (0, 1)),
            Err(Error::InsufficientData(_))
        ));
    }

    /// Multiplicative noise U(0.9, 1.1) on a true rate of 0.7 over 50 epochs
    /// keeps the fit inside [0.68, 0.72] for every seed.
    #[test]
    fn noisy_geometric_fit_stays_close() {
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = 1.0f64;
            let mut series = Vec::new();
            for k in 0..50 {
                series.push((k as f64, s * rng.gen_range(0.9..1.1)));
                s *= 0.7;
            }
            let est = estimate_rate_series(&series, (0, 49)).unwrap();
            assert!(
                est.rho_hat > 0.68 && est.rho_hat < 0.72,
                "seed {seed}: rho_hat = {}",
                est.rho_hat
            );
        }
    }
}
