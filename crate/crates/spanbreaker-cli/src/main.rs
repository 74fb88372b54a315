//! Experiment CLI: build worst-case instances, run solvers, and write
//! traces/tables as CSV.
//!
//! Exit codes: 0 on success, 2 when a budget or accuracy target was not
//! reached, 1 on any error.

mod output;
mod runner;
mod spec;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use spanbreaker::harness::speedup_experiment;
use spec::RunSpec;

#[derive(Parser)]
#[command(name = "spanbreaker", version, about = "Finite-sum solver experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a run spec: one trace CSV per seed plus a summary CSV.
    Run(RunArgs),
    /// Execute a run spec and print empirical vs guaranteed rates.
    Rates(RunArgs),
    /// Accuracy-crossing comparison of the hybrid solver vs the span
    /// baseline across instance sizes.
    Speedup(SpeedupArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON run spec.
    #[arg(long)]
    spec: PathBuf,
    /// Output directory; overrides the spec's `output` field.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated seed list; overrides the spec's `seeds` field.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Log the sampled epoch lengths to stderr.
    #[arg(long)]
    debug_epochs: bool,
}

#[derive(Args)]
struct SpeedupArgs {
    /// Comma-separated component counts, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    n_list: Vec<usize>,
    /// Accuracy exponent: target eps = 1/n^alpha (relative).
    #[arg(long)]
    alpha: f64,
    /// Conditioning exponent: kappa = n^beta.
    #[arg(long)]
    beta: f64,
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Rates(args) => cmd_rates(args),
        Command::Speedup(args) => cmd_speedup(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn load_spec(args: &RunArgs) -> Result<RunSpec> {
    let text = fs::read_to_string(&args.spec)
        .with_context(|| format!("reading spec {}", args.spec.display()))?;
    let mut spec = RunSpec::parse(&text)?;
    if let Some(seeds) = &args.seeds {
        spec.seeds = seeds.clone();
        spec.validate()?;
    }
    if let Some(out) = &args.out {
        spec.output = Some(out.display().to_string());
    }
    Ok(spec)
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("SPANBREAKER_THREADS") {
        let k: usize = v.parse().with_context(|| {
            format!("SPANBREAKER_THREADS must be a positive integer, got {v:?}")
        })?;
        if k == 0 {
            bail!("SPANBREAKER_THREADS must be >= 1");
        }
        builder = builder.num_threads(k);
    }
    Ok(builder.build()?)
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let spec = load_spec(&args)?;
    let out_dir = PathBuf::from(
        spec.output
            .clone()
            .ok_or_else(|| anyhow::anyhow!("spec needs an `output` directory (or pass --out)"))?,
    );
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output dir {}", out_dir.display()))?;

    let traces = thread_pool()?.install(|| runner::run_spec(&spec, args.debug_epochs))?;
    for (&seed, trace) in spec.seeds.iter().zip(&traces) {
        let path = out_dir.join(output::trace_file_name(&spec.solver.name, seed));
        output::write_trace_csv(&path, trace)?;
    }
    output::write_summary_csv(
        &out_dir,
        &spec.solver.name,
        &spec.seeds,
        &traces,
        &spec.canonical_json(),
    )?;

    if traces.iter().any(|t| !t.complete) {
        eprintln!("warning: some runs exhausted their budget before completing");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_rates(args: RunArgs) -> Result<ExitCode> {
    let spec = load_spec(&args)?;
    let row = thread_pool()?.install(|| runner::rates_report(&spec, args.debug_epochs))?;
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    println!("solver,rho_hat,rate_bound,optimal_bound,ratio");
    println!(
        "{},{},{},{},{}",
        row.solver,
        fmt(row.rho_hat),
        fmt(row.rate_bound),
        fmt(row.optimal_bound),
        fmt(row.ratio)
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_speedup(args: SpeedupArgs) -> Result<ExitCode> {
    let rows = speedup_experiment(&args.n_list, args.alpha, args.beta, &args.seeds)?;
    output::write_speedup_csv(&args.out, &rows)?;
    if rows.iter().any(|r| !r.reached) {
        eprintln!("warning: some runs did not reach the accuracy target within budget");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}
