//! Solver run records.

/// One recorded state of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    /// Cumulative gradient-evaluation units (component gradient = 1,
    /// full-gradient snapshot = n, dual coordinate step = 1).
    pub grad_units: u64,
    /// Epoch index for epoch-structured solvers, `grad_units / n` otherwise.
    pub epoch: u64,
    /// `F(x) - F(x*)`, clamped at zero; `None` when no reference value exists.
    pub suboptimality: Option<f64>,
    /// `||x - x*||^2 ` when the minimizer is known.
    pub dist_sq: Option<f64>,
}

/// Enough metadata to re-run the trace exactly.
#[derive(Debug, Clone, Default)]
pub struct TraceMeta {
    pub solver: String,
    pub instance: String,
    pub config: String,
    pub seed: u64,
}

/// Time series of a single solver run.
#[derive(Debug, Clone)]
pub struct Trace {
    pub points: Vec<TracePoint>,
    pub meta: TraceMeta,
    /// False when a gradient-unit budget truncated the run.
    pub complete: bool,
}

impl Trace {
    pub fn new(meta: TraceMeta) -> Self {
        Trace {
            points: Vec::new(),
            meta,
            complete: true,
        }
    }

    /// Appends a point, clamping slightly negative suboptimality to zero.
    /// Panics if `grad_units` does not strictly increase.
    pub fn push(
        &mut self,
        grad_units: u64,
        epoch: u64,
        suboptimality: Option<f64>,
        dist_sq: Option<f64>,
    ) {
        if let Some(last) = self.points.last() {
            assert!(
                grad_units > last.grad_units,
                "trace grad_units must strictly increase ({} -> {})",
                last.grad_units,
                grad_units
            );
        }
        let suboptimality = suboptimality.map(|s| if s < 0.0 { 0.0 } else { s });
        self.points.push(TracePoint {
            grad_units,
            epoch,
            suboptimality,
            dist_sq,
        });
    }

    pub fn last(&self) -> Option<&TracePoint> {
        self.points.last()
    }

    /// Suboptimality series as `(epoch, value)` pairs, skipping unknown values.
    pub fn suboptimality_series(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.suboptimality.map(|s| (p.epoch as f64, s)))
            .collect()
    }
}
