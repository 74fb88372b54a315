//! Run specification: JSON in, validated execution plan out.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub problem: ProblemSpec,
    pub solver: SolverSpec,
    pub budget: Budget,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_b: Option<usize>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub name: String,
    #[serde(default = "default_params")]
    pub params: ParamsSpec,
}

fn default_params() -> ParamsSpec {
    ParamsSpec::Explicit(ExplicitParams::default())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamsSpec {
    /// The literal string "auto": optimal epoch/step selection.
    Named(String),
    Explicit(ExplicitParams),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// "uniform" (default) or "importance".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    /// "geometric" (default) or "fixed".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epoch_mode: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grad_units: Option<u64>,
}

impl RunSpec {
    pub fn parse(text: &str) -> Result<RunSpec> {
        let spec: RunSpec =
            serde_json::from_str(text).context("spec file is not a valid RunSpec document")?;
        spec.validate()?;
        Ok(spec)
    }

    /// Compact canonical form embedded in summaries; re-running from it
    /// reproduces the outputs byte for byte. The output directory is a
    /// delivery detail, not part of the run identity, so it is dropped.
    pub fn canonical_json(&self) -> String {
        let mut normalized = self.clone();
        normalized.output = None;
        serde_json::to_string(&normalized).expect("RunSpec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match (self.budget.epochs, self.budget.grad_units) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => bail!("budget must set exactly one of `epochs` or `grad_units`"),
        }
        if self.seeds.is_empty() {
            bail!("seeds list must be non-empty");
        }

        let kind = self.problem.kind.as_str();
        match kind {
            "chain" => {
                need(self.problem.d, "problem.d", kind)?;
                need(self.problem.l, "problem.L", kind)?;
                need(self.problem.sigma, "problem.sigma", kind)?;
            }
            "block" => {
                need(self.problem.n, "problem.n", kind)?;
                need(self.problem.d_b, "problem.d_b", kind)?;
                need(self.problem.l, "problem.L", kind)?;
                need(self.problem.sigma, "problem.sigma", kind)?;
            }
            "sdca" => {
                need(self.problem.n, "problem.n", kind)?;
                need(self.problem.l, "problem.L", kind)?;
                need(self.problem.mu, "problem.mu", kind)?;
            }
            "ncvx" => {
                need(self.problem.n, "problem.n", kind)?;
                need(self.problem.d, "problem.d", kind)?;
                need(self.problem.l, "problem.L", kind)?;
                need(self.problem.mu, "problem.mu", kind)?;
                need(self.problem.spread, "problem.spread", kind)?;
            }
            other => bail!("unknown problem kind {other:?} (expected chain|block|sdca|ncvx)"),
        }

        let solver = self.solver.name.as_str();
        if !matches!(solver, "svrg" | "sarah" | "saga" | "gd" | "sdca") {
            bail!("unknown solver {solver:?} (expected svrg|sarah|saga|gd|sdca)");
        }
        if solver == "sdca" && kind != "sdca" {
            bail!("sdca requires kind=sdca, got kind={kind:?}");
        }
        if let ParamsSpec::Named(name) = &self.solver.params {
            if name != "auto" {
                bail!("unknown named params {name:?} (only \"auto\" is recognized)");
            }
            let auto_ok = matches!(solver, "svrg" | "sarah") && kind != "ncvx"
                || solver == "svrg" && kind == "ncvx";
            if !auto_ok {
                bail!("params \"auto\" is only valid for svrg/sarah (and svrg on ncvx)");
            }
        }
        if let ParamsSpec::Explicit(p) = &self.solver.params {
            if let Some(dist) = &p.p {
                if !matches!(dist.as_str(), "uniform" | "importance") {
                    bail!("params.p must be \"uniform\" or \"importance\", got {dist:?}");
                }
            }
            if let Some(mode) = &p.epoch_mode {
                if !matches!(mode.as_str(), "geometric" | "fixed") {
                    bail!("params.epoch_mode must be \"geometric\" or \"fixed\", got {mode:?}");
                }
            }
            if matches!(solver, "svrg" | "sarah") && (p.eta.is_none() != p.m.is_none()) {
                bail!("explicit {solver} params need both `eta` and `m` (or \"auto\")");
            }
            if matches!(solver, "svrg" | "sarah") && p.eta.is_none() && p.m.is_none() {
                bail!("{solver} needs params \"auto\" or explicit eta and m");
            }
        }
        Ok(())
    }
}

fn need<T>(v: Option<T>, field: &str, kind: &str) -> Result<()> {
    if v.is_none() {
        bail!("{field} is required for kind={kind}");
    }
    Ok(())
}
