//! CSV writers. Floats use the shortest round-trip decimal form so reruns
//! are byte-stable; files are written to a temp path and renamed into place.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use spanbreaker::Trace;

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Writes one trace as `grad_units,epoch,suboptimality,dist_sq`. Unknown
/// suboptimality or distance fields are left empty, not zero.
pub fn write_trace_csv(path: &Path, trace: &Trace) -> Result<()> {
    let mut out = String::from("grad_units,epoch,suboptimality,dist_sq\n");
    for p in &trace.points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            p.grad_units,
            p.epoch,
            fmt_opt(p.suboptimality),
            fmt_opt(p.dist_sq)
        ));
    }
    write_atomic(path, out.as_bytes())
}

pub fn trace_file_name(solver: &str, seed: u64) -> String {
    format!("trace_{solver}_seed{seed}.csv")
}

/// Summary with one row per run plus the canonicalized spec, written last.
pub fn write_summary_csv(
    dir: &Path,
    solver: &str,
    seeds: &[u64],
    traces: &[Trace],
    canonical_spec: &str,
) -> Result<PathBuf> {
    let path = dir.join("summary.csv");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "solver",
        "seed",
        "trace_file",
        "points",
        "final_grad_units",
        "final_epoch",
        "final_suboptimality",
        "final_dist_sq",
        "complete",
        "spec_json",
    ])?;
    for (&seed, trace) in seeds.iter().zip(traces) {
        let last = trace.points.last();
        w.write_record([
            solver.to_string(),
            seed.to_string(),
            trace_file_name(solver, seed),
            trace.points.len().to_string(),
            last.map(|p| p.grad_units.to_string()).unwrap_or_default(),
            last.map(|p| p.epoch.to_string()).unwrap_or_default(),
            fmt_opt(last.and_then(|p| p.suboptimality)),
            fmt_opt(last.and_then(|p| p.dist_sq)),
            trace.complete.to_string(),
            canonical_spec.to_string(),
        ])?;
    }
    let bytes = w.into_inner().context("flushing summary")?;
    write_atomic(&path, &bytes)?;
    Ok(path)
}

/// Speedup table with the fixed schema `n,kappa,eps,K_svrg,K_saga,ratio`.
pub fn write_speedup_csv(path: &Path, rows: &[spanbreaker::harness::SpeedupRow]) -> Result<()> {
    let mut out = String::from("n,kappa,eps,K_svrg,K_saga,ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n, r.kappa, r.eps, r.k_svrg, r.k_saga, r.ratio
        ));
    }
    write_atomic(path, out.as_bytes())
}
