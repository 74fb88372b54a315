//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured quantities (visible with --nocapture).

use std::process::Command;
use std::time::Instant;

use spanbreaker::adversarial::{
    block_adversarial, nesterov_chain, nonconvex_quadratic_sum, sdca_adversarial,
    sdca_expectation_eigenvalue,
};
use spanbreaker::harness::{
    estimate_rate_series, mean_suboptimality_by_epoch, oracles, sdca_enumerated_mean,
    sdca_expectation_step, BlockSupportTracker,
};
use spanbreaker::problem::{
    effective_condition_number, effective_lipschitz, nonconvex_importance_distribution,
    second_moment_lipschitz, FiniteSumProblem, SamplingDistribution,
};
use spanbreaker::solvers::{
    nonconvex_svrg_params, optimal_rate_bound, optimal_svrg_params, prox_svrg, prox_svrg_observed,
    saga_observed, sdca, svrg_rate_bound, SagaConfig, SvrgConfig,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spanbreaker"))
}

/// 1. Every generator passes finite-difference gradient checks at
///    relative error 1e-6 on 10 random points per component.
#[test]
fn criterion_1_gradient_correctness() {
    let start = Instant::now();
    let instances: Vec<FiniteSumProblem> = vec![
        nesterov_chain(4.0, 1.0, 256).unwrap(),
        block_adversarial(64, 4.0 / 64.0, 1.0 / 256.0, 4).unwrap(),
        sdca_adversarial(24, 2.0, 1.0).unwrap().as_problem(),
        nonconvex_quadratic_sum(16, 32, 1.0, 8.0, 12.0, 7)
            .unwrap()
            .into_problem(),
        nonconvex_quadratic_sum(16, 16, 0.5, 4.0, 0.0, 8)
            .unwrap()
            .into_problem(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for p in &instances {
        assert!(p.n() <= 64 && p.dim() <= 256);
        let pts: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..p.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let err = oracles::max_component_grad_rel_error(p, &pts, 1e-5).unwrap();
        assert!(
            err <= 1e-6,
            "{}: finite-difference error {err:e}",
            p.descriptor()
        );
        worst = worst.max(err);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("ACCEPTANCE 1 gradient_correctness: PASS (worst rel err {worst:.2e}, {elapsed:?})");
}

/// 2. Optimal-parameter hybrid solver contracts at least as fast as
///    sqrt(100/(121 + n/kappa_Q)) * 1.10 per epoch on the big block
///    instance (n = 4096, kappa_Q = 16, mu = 1), 20 seeds, epochs 3-12.
#[test]
fn criterion_2_optimal_rate() {
    let start = Instant::now();
    let n = 4096usize;
    let kappa = 16.0;
    let sigma = 1.0 / n as f64;
    let p = block_adversarial(n, kappa * sigma, sigma, 2).unwrap();
    assert!((p.mu() - 1.0).abs() < 1e-12);
    let dist = SamplingDistribution::uniform(n);
    let l_q = effective_lipschitz(&p, &dist).unwrap();
    let kappa_q = effective_condition_number(&p, &dist).unwrap();
    assert!((kappa_q - 16.0).abs() < 1e-9);
    let (m, eta) = optimal_svrg_params(n, kappa_q, l_q).unwrap();

    let traces: Vec<_> = (0..20u64)
        .map(|seed| prox_svrg(&p, &SvrgConfig::new(eta, m, 12, dist.clone(), seed)).unwrap())
        .collect();
    let mean = mean_suboptimality_by_epoch(&traces);
    let est = estimate_rate_series(&mean, (3, 12)).unwrap();
    let bound = optimal_rate_bound(n, kappa_q);
    assert!((bound - 0.5150).abs() < 1e-4);
    assert!(
        est.rho_hat <= bound * 1.10,
        "rho_hat {} above {}",
        est.rho_hat,
        bound * 1.10
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 2 optimal_rate: PASS (rho_hat {:.4} <= {:.4}, {elapsed:?})",
        est.rho_hat,
        bound * 1.10
    );
}

/// 3. Rate formula on the worked example: 0.42441 +- 1e-4, below the
///    algebraic chain bound 10 sqrt(kappa_Q/m).
#[test]
fn criterion_3_rate_formula() {
    let (n, kappa_q, l_q, mu) = (100usize, 10.0, 10.0, 1.0);
    let (m, eta) = optimal_svrg_params(n, kappa_q, l_q).unwrap();
    let rho = svrg_rate_bound(mu, eta, m, l_q).unwrap();
    assert!((rho - 0.42441).abs() <= 1e-4, "rho = {rho}");
    let chain_bound = 10.0 * (kappa_q / m).sqrt();
    assert!(rho <= chain_bound);
    println!("ACCEPTANCE 3 rate_formula: PASS (rho {rho:.5} <= {chain_bound:.5})");
}

/// 4. Span-condition floor: the span baseline run from the origin keeps
///    dist ratio >= sum_i q^(2 N_i) / n at every step of every seed, and
///    the 200-seed mean at k = n stays above (1 - 2/n)^n (1 - 3/sqrt(200)).
#[test]
fn criterion_4_span_floor() {
    let start = Instant::now();
    let (n, kappa, d_b) = (256usize, 16.0, 32usize);
    let sigma = 1.0 / n as f64;
    let p = block_adversarial(n, kappa * sigma, sigma, d_b).unwrap();
    let seeds = 200u64;
    let mut ratio_at_n = 0.0;
    for seed in 0..seeds {
        let mut tracker = BlockSupportTracker::new(&p, kappa, true);
        let cfg = SagaConfig::new(SamplingDistribution::uniform(n), 2 * n as u64, seed);
        saga_observed(&p, &cfg, &mut tracker).unwrap();
        assert_eq!(
            tracker.floor_violations, 0,
            "seed {seed}: distance ratio dipped below the support floor"
        );
        assert!(
            tracker.max_excess <= 0,
            "seed {seed}: support exceeded draws"
        );
        ratio_at_n += tracker.dist_ratio[n - 1].1;
    }
    let mean_at_n = ratio_at_n / seeds as f64;
    let threshold = (1.0 - 2.0 / n as f64).powi(n as i32) * (1.0 - 3.0 / (seeds as f64).sqrt());
    assert!(
        mean_at_n >= threshold,
        "mean ratio at k=n is {mean_at_n}, needs >= {threshold}"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 4 span_floor: PASS (mean ratio {mean_at_n:.4} >= {threshold:.4}, {elapsed:?})"
    );
}

/// 5. Hybrid escape: on the same instance the hybrid solver exceeds the
///    span support bound within 2 epochs on every seed, and its 1-epoch
///    distance ratio beats the span baseline's 1-epoch mean by >= 2x.
#[test]
fn criterion_5_hybrid_escape() {
    let start = Instant::now();
    let (n, kappa, d_b) = (256usize, 16.0, 32usize);
    let sigma = 1.0 / n as f64;
    let p = block_adversarial(n, kappa * sigma, sigma, d_b).unwrap();
    let dist = SamplingDistribution::uniform(n);
    let l_q = effective_lipschitz(&p, &dist).unwrap();
    let kappa_q = effective_condition_number(&p, &dist).unwrap();
    let (m, eta) = optimal_svrg_params(n, kappa_q, l_q).unwrap();

    let svrg_seeds = 20u64;
    let mut svrg_ratio = 0.0;
    for seed in 0..svrg_seeds {
        let mut tracker = BlockSupportTracker::new(&p, kappa, false);
        let cfg = SvrgConfig::new(eta, m, 2, dist.clone(), seed);
        let trace = prox_svrg_observed(&p, &cfg, &mut tracker).unwrap();
        assert!(
            tracker.first_excess_step.is_some(),
            "seed {seed}: no support-bound violation within 2 epochs"
        );
        svrg_ratio += trace.points[1].dist_sq.unwrap() / trace.points[0].dist_sq.unwrap();
    }
    let svrg_mean = svrg_ratio / svrg_seeds as f64;

    let saga_seeds = 200u64;
    let mut saga_ratio = 0.0;
    for seed in 0..saga_seeds {
        let mut cfg = SagaConfig::new(dist.clone(), n as u64, seed);
        cfg.record_every = n as u64;
        let trace = spanbreaker::solvers::saga(&p, &cfg).unwrap();
        saga_ratio += trace.points[1].dist_sq.unwrap() / trace.points[0].dist_sq.unwrap();
    }
    let saga_mean = saga_ratio / saga_seeds as f64;
    assert!(
        svrg_mean * 2.0 <= saga_mean,
        "hybrid 1-epoch ratio {svrg_mean:.3e} not 2x below span baseline {saga_mean:.3e}"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 5 hybrid_escape: PASS (hybrid {svrg_mean:.2e} vs baseline {saga_mean:.3}, {elapsed:?})"
    );
}

/// 6. Dual coordinate ascent lower bound on the structured ridge instance
///    (n = 8, L = 2, mu = 1): exact expectation recursion, empirical
///    distance floor theta^(2k), and theta >= 1 - 2/n.
#[test]
fn criterion_6_sdca_lower_bound() {
    let start = Instant::now();
    let (n, l, mu) = (8usize, 2.0, 1.0);
    let inst = sdca_adversarial(n, l, mu).unwrap();
    let alpha0 = vec![1.0; n];

    // (a) enumeration mean equals T^k alpha0 for k <= 4.
    let mut expected = alpha0.clone();
    for k in 1..=4u32 {
        expected = sdca_expectation_step(&inst, &expected);
        let enumerated = sdca_enumerated_mean(&inst, &alpha0, k).unwrap();
        for (a, b) in enumerated.iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-10, "k = {k}: {a} vs {b}");
        }
    }

    // (b) the 1000-seed mean of |x^k|^2/|x^0|^2 respects the theta floor.
    let theta = sdca_expectation_eigenvalue(n, l, mu).unwrap();
    let seeds = 1000u64;
    let k_max = 32usize;
    let mut sums = vec![0.0f64; k_max + 1];
    for seed in 0..seeds {
        let run = sdca(&inst, &alpha0, k_max as u64, seed).unwrap();
        let base = run.trace.points[0].dist_sq.unwrap();
        for (k, pt) in run.trace.points.iter().enumerate() {
            sums[k] += pt.dist_sq.unwrap() / base;
        }
    }
    let slack = 1.0 - 3.0 / (seeds as f64).sqrt();
    for (k, sum) in sums.iter().enumerate() {
        let mean = sum / seeds as f64;
        let floor = theta.powi(2 * k as i32) * slack;
        assert!(mean >= floor, "k = {k}: mean {mean} below floor {floor}");
    }

    // (c) theta >= 1 - 2/n.
    assert!(theta >= 1.0 - 2.0 / n as f64, "theta = {theta}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 6 sdca_lower_bound: PASS (theta {theta:.5} >= {:.3}, floors hold, {elapsed:?})",
        1.0 - 2.0 / n as f64
    );
}

/// 7. Accuracy-crossing trend: ratio column >= 1 for n in 2^8..2^13
///    (kappa = sqrt(n), eps = 1/sqrt(n), 5 seeds) and increasing in at
///    least 4 of the 5 steps.
#[test]
fn criterion_7_speedup_trend() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("speedup.csv");
    let status = bin()
        .args([
            "speedup",
            "--n-list",
            "256,512,1024,2048,4096,8192",
            "--alpha",
            "0.5",
            "--beta",
            "0.5",
            "--seeds",
            "1,2,3,4,5",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "speedup command failed: {status:?}");

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,kappa,eps,K_svrg,K_saga,ratio");
    let mut ratios = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 6, "row: {line}");
        let k_svrg: u64 = fields[3].parse().unwrap();
        let k_saga: u64 = fields[4].parse().unwrap();
        let ratio: f64 = fields[5].parse().unwrap();
        assert!(k_svrg > 0 && k_saga > 0);
        assert!((ratio - k_saga as f64 / k_svrg as f64).abs() <= 1e-9);
        ratios.push(ratio);
    }
    assert_eq!(ratios.len(), 6);
    assert!(
        ratios.iter().all(|&r| r >= 1.0),
        "ratios not all >= 1: {ratios:?}"
    );
    let increasing = ratios.windows(2).filter(|w| w[1] > w[0]).count();
    assert!(
        increasing >= 4,
        "only {increasing} increasing steps: {ratios:?}"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!("ACCEPTANCE 7 speedup_trend: PASS (ratios {ratios:?}, {elapsed:?})");
}

/// 8. Nonconvex components: with the variance-safe step and m = n, the
///    measured contraction beats 1/(1 + m*eta*mu/2) * 1.25 over 10 seeds,
///    and at least one component is certified indefinite.
#[test]
fn criterion_8_nonconvex_rate() {
    let start = Instant::now();
    let (n, d, mu, l, spread) = (512usize, 32usize, 1.0, 32.0, 48.0);
    let inst = nonconvex_quadratic_sum(n, d, mu, l, spread, 20250809).unwrap();
    assert!(inst.nonconvex_components(), "no indefinite component");
    let p = inst.problem();
    let dist = nonconvex_importance_distribution(p).unwrap();
    let lbar = second_moment_lipschitz(p, &dist).unwrap();
    let m = n as f64;
    let params = nonconvex_svrg_params(n, p.lipschitz(), lbar, p.mu(), m).unwrap();

    let epochs = 40usize;
    let traces: Vec<_> = (0..10u64)
        .map(|seed| {
            prox_svrg(
                p,
                &SvrgConfig::new(params.eta, m, epochs, dist.clone(), seed),
            )
            .unwrap()
        })
        .collect();
    let mean = mean_suboptimality_by_epoch(&traces);
    let est = estimate_rate_series(&mean, (epochs as u64 / 2, epochs as u64)).unwrap();
    let bound = params.rho * 1.25;
    assert!(
        est.rho_hat <= bound,
        "rho_hat {} above {bound} (predicted {})",
        est.rho_hat,
        params.rho
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 8 nonconvex_rate: PASS (rho_hat {:.4} <= {bound:.4}, indefinite components, {elapsed:?})",
        est.rho_hat
    );
}

/// 9. Determinism: identical run specs produce byte-identical CSVs.
#[test]
fn criterion_9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("spec.json");
    std::fs::write(
        &spec_path,
        r#"{
            "problem": {"kind": "block", "n": 32, "d_b": 4, "L": 4.0, "sigma": 1.0},
            "solver": {"name": "svrg", "params": "auto"},
            "budget": {"epochs": 6},
            "seeds": [1, 2, 3],
            "output": "unused"
        }"#,
    )
    .unwrap();
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for out in [&out1, &out2] {
        let status = bin()
            .args(["run", "--spec"])
            .arg(&spec_path)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let mut names: Vec<_> = std::fs::read_dir(&out1)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 4); // 3 traces + summary
    for name in names {
        let a = std::fs::read(out1.join(&name)).unwrap();
        let b = std::fs::read(out2.join(&name)).unwrap();
        assert_eq!(a, b, "{name:?} differs between reruns");
    }
    println!("ACCEPTANCE 9 determinism: PASS (byte-identical reruns)");
}
