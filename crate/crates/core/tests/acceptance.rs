//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs the full-scale experiments (10^4 trials, N = 1..20)
//! for both strategies once and shares them across criteria.

use std::collections::HashSet;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use symest::harness::{ExperimentOutput, FidelityCurve, SnapshotDistribution};
use symest::oracle;
use symest::stats::{ks_uniform, mean_and_std_error};
use symest::strategy::{haar_random_qubit, hypothetical_estimates, objective_from_estimates};
use symest::{
    make_sphere_grid, mle_estimate, p_antisymmetric, p_symmetric, run_experiment, ExperimentConfig,
    MeasurementRecord, MeasurementSequence, Outcome, RngStream, StrategyName,
};

const TRIALS: usize = 10_000;
const N_MAX: usize = 20;
const SEVEN_TWELFTHS: f64 = 7.0 / 12.0;

struct Context {
    adaptive: ExperimentOutput,
    random: ExperimentOutput,
}

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn full_config(strategy: StrategyName) -> ExperimentConfig {
    ExperimentConfig {
        strategy,
        n_max: N_MAX,
        trials: TRIALS,
        snapshot_steps: vec![1, 5, 20],
        ..ExperimentConfig::default()
    }
}

fn snapshot(out: &ExperimentOutput, step: usize) -> &SnapshotDistribution {
    out.snapshots
        .iter()
        .find(|s| s.step == step)
        .expect("snapshot step configured")
}

fn combined_se(a: &FidelityCurve, b: &FidelityCurve, n: usize) -> f64 {
    let (ra, rb) = (a.row(n).unwrap(), b.row(n).unwrap());
    ra.std_error.hypot(rb.std_error)
}

fn c1_single_step(ctx: &Context) -> Verdict {
    let a = ctx.adaptive.curve.row(1).unwrap().mean_fidelity;
    let r = ctx.random.curve.row(1).unwrap().mean_fidelity;
    let exact = oracle::single_step_mean_fidelity();
    verdict(
        (a - exact).abs() < 0.01
            && (r - exact).abs() < 0.01
            && (exact - SEVEN_TWELFTHS).abs() < 1e-14,
        format!("<F_1> adaptive {a:.4}, random {r:.4}, closed form {exact:.6} (tol 0.01)"),
    )
}

fn c2_dominance(ctx: &Context) -> Verdict {
    let (a, r) = (&ctx.adaptive.curve, &ctx.random.curve);
    let never_worse = (1..=N_MAX).all(|n| {
        a.row(n).unwrap().mean_fidelity
            >= r.row(n).unwrap().mean_fidelity - 2.0 * combined_se(a, r, n)
    });
    let (best_n, best_gap) = (3..=N_MAX)
        .map(|n| {
            (
                n,
                a.row(n).unwrap().mean_fidelity - r.row(n).unwrap().mean_fidelity,
            )
        })
        .fold((0, f64::NEG_INFINITY), |b, x| if x.1 > b.1 { x } else { b });
    verdict(
        never_worse && best_gap >= 0.01,
        format!("never below random - 2 SE: {never_worse}; largest gap {best_gap:.4} at N={best_n} (need >= 0.01)"),
    )
}

fn c3_optimal_bound(ctx: &Context) -> Verdict {
    let worst = ctx
        .adaptive
        .curve
        .rows
        .iter()
        .map(|r| r.mean_fidelity - (r.optimal_bound + 2.0 * r.std_error))
        .fold(f64::NEG_INFINITY, f64::max);
    verdict(
        worst <= 0.0,
        format!("max <F_N> - ((N+1)/(N+2) + 2 SE) = {worst:.4}"),
    )
}

fn c4_objective_quadrature() -> Verdict {
    let grid = make_sphere_grid(256).unwrap();
    let mut rng = RngStream::for_trial(2024, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let len = (rng.uniform() * 5.0) as usize;
        let history: MeasurementSequence = (0..len)
            .map(|_| {
                let o = if rng.uniform() < 0.35 {
                    Outcome::Antisymmetric
                } else {
                    Outcome::Symmetric
                };
                MeasurementRecord::new(o, haar_random_qubit(&mut rng))
            })
            .collect();
        let c = haar_random_qubit(&mut rng);
        let (e_a, e_s) = hypothetical_estimates(&history, &c, &grid).unwrap();
        let closed = objective_from_estimates(
            &c.to_unit_vector(),
            &e_a.to_unit_vector(),
            &e_s.to_unit_vector(),
        );
        worst = worst.max((closed - oracle::objective_quadrature(&c, &e_a, &e_s)).abs());
    }
    verdict(
        worst < 1e-6,
        format!("max |closed form - 10^4-node quadrature| = {worst:.3e} (tol 1e-6)"),
    )
}

fn c5_mle_oracle() -> Verdict {
    let grid = make_sphere_grid(1024).unwrap();
    let mut rng = RngStream::for_trial(2024, 1);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let len = 1 + (rng.uniform() * 5.0) as usize;
        let seq: MeasurementSequence = (0..len)
            .map(|_| {
                let o = if rng.uniform() < 0.35 {
                    Outcome::Antisymmetric
                } else {
                    Outcome::Symmetric
                };
                MeasurementRecord::new(o, haar_random_qubit(&mut rng))
            })
            .collect();
        let mle = mle_estimate(&seq, &grid).unwrap();
        let (_, dense) = oracle::dense_lattice_mle(&seq, 1000, 1000);
        worst = worst.max(dense - mle.log_likelihood);
    }
    verdict(
        worst <= 1e-4,
        format!("max (10^6-lattice max - estimator) = {worst:.3e} over 100 sequences (tol 1e-4)"),
    )
}

fn c6_measurement_model() -> Verdict {
    let mut rng = RngStream::for_trial(2024, 2);
    let mut ok = true;
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let a = haar_random_qubit(&mut rng);
        let b = haar_random_qubit(&mut rng);
        let pa = p_antisymmetric(&a, &b);
        ok &= pa + p_symmetric(&a, &b) == 1.0;
        ok &= (0.0..=0.5).contains(&pa);
        ok &= p_antisymmetric(&a, &a) == 0.0;
        ok &= (p_antisymmetric(&a, &a.antipode()) - 0.5).abs() < 1e-12;
        worst = worst.max((pa - oracle::p_antisymmetric_trig(&a, &b)).abs());
    }
    ok &= p_antisymmetric(&symest::Qubit::ZERO, &symest::Qubit::ONE) == 0.5;
    verdict(
        ok && worst < 1e-12,
        format!("exact identities hold: {ok}; max |dot - trig| = {worst:.3e} (tol 1e-12)"),
    )
}

fn c7_reference_multiplicity(ctx: &Context) -> Verdict {
    let distinct: HashSet<(u64, u64)> = ctx
        .adaptive
        .trials
        .iter()
        .map(|t| {
            let r = t.records.records()[4].reference;
            (r.theta().to_bits(), r.phi().to_bits())
        })
        .collect();
    verdict(
        distinct.len() <= 16,
        format!(
            "{} distinct 5th references over {TRIALS} trials (bound 16)",
            distinct.len()
        ),
    )
}

fn c8_convergence(ctx: &Context) -> Verdict {
    let fr: Vec<f64> = [1, 5, 20]
        .iter()
        .map(|&s| snapshot(&ctx.adaptive, s).estimate_fraction_above(0.9))
        .collect();
    verdict(
        fr[0] < fr[1] && fr[1] < fr[2],
        format!(
            "P(cos theta_rot > 0.9) at N=1,5,20: {:.4}, {:.4}, {:.4}",
            fr[0], fr[1], fr[2]
        ),
    )
}

fn c9_reference_bias(ctx: &Context) -> Verdict {
    let late: Vec<f64> = snapshot(&ctx.adaptive, 20)
        .references
        .iter()
        .map(|p| p.cos_theta)
        .collect();
    let (mean, se) = mean_and_std_error(&late);
    let first: Vec<f64> = snapshot(&ctx.adaptive, 1)
        .references
        .iter()
        .map(|p| p.cos_theta)
        .collect();
    let ks = ks_uniform(&first, -1.0, 1.0);
    verdict(
        mean > 3.0 * se && ks.p_value > 0.01,
        format!(
            "N=20 mean cos {mean:.4} ({:.1} SE); N=1 KS p = {:.3}",
            mean / se,
            ks.p_value
        ),
    )
}

fn c10_determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_symest");
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, tag: &str| -> bool {
        ["run", "compare", "snapshot"].iter().all(|cmd| {
            let out = dir.path().join(format!("{cmd}-{tag}"));
            Command::new(bin)
                .args([
                    *cmd,
                    "--n-max",
                    "6",
                    "--trials",
                    "400",
                    "--snapshot-steps",
                    "1,6",
                    "--out",
                ])
                .arg(&out)
                .env("SYMEST_THREADS", threads)
                .output()
                .map(|o| o.status.success())
                .unwrap_or(false)
        })
    };
    let ok = run("1", "a") && run("1", "b") && run("4", "c");
    let files = [
        "run/fidelity_curve.csv",
        "compare/comparison.csv",
        "snapshot/estimates_N6.csv",
        "snapshot/references_N6.csv",
        "snapshot/hist_estimates_N1.csv",
        "snapshot/hist_references_N6.csv",
    ];
    let read = |tag: &str, f: &str| {
        let (cmd, name) = f.split_once('/').unwrap();
        std::fs::read(
            dir.path()
                .join(format!("{cmd}-{tag}"))
                .join(Path::new(name)),
        )
        .unwrap_or_default()
    };
    let identical = ok
        && files.iter().all(|f| {
            let a = read("a", f);
            !a.is_empty() && a == read("b", f) && a == read("c", f)
        });
    verdict(
        identical,
        format!(
            "{} CSVs byte-identical across reruns and 1 vs 4 workers: {identical}",
            files.len()
        ),
    )
}

fn regression_snapshots(ctx: &Context) -> Verdict {
    let snap = snapshot(&ctx.adaptive, 20);
    let cos: Vec<f64> = snap.estimates.iter().map(|p| p.cos_theta).collect();
    let (mean, _) = mean_and_std_error(&cos);
    let modal = snap
        .estimate_histogram
        .bin_edges(snap.estimate_histogram.mode());
    let monotone = ctx.adaptive.curve.rows.windows(2).all(|w| {
        w[1].mean_fidelity >= w[0].mean_fidelity - 2.0 * w[0].std_error.hypot(w[1].std_error)
    });
    let counts_ok = ctx.adaptive.snapshots.iter().all(|s| {
        s.estimate_histogram.total() == TRIALS as u64
            && s.reference_histogram.total() == TRIALS as u64
    });
    verdict(
        mean > 0.70 && (modal.0 - 0.95).abs() < 1e-12 && monotone && counts_ok,
        format!(
            "N=20 mean cos {mean:.4} (frozen > 0.70), modal bin [{:.2}, {:.2}], monotone {monotone}, histogram totals {counts_ok}",
            modal.0, modal.1
        ),
    )
}

fn main() {
    let started = Instant::now();
    let ctx = Context {
        adaptive: run_experiment(&full_config(StrategyName::Adaptive)).unwrap(),
        random: run_experiment(&full_config(StrategyName::Random)).unwrap(),
    };
    println!("full-scale experiments done in {:.1?}", started.elapsed());

    let results = [
        ("1 single-step fidelity = 7/12", c1_single_step(&ctx)),
        ("2 adaptive dominates random", c2_dominance(&ctx)),
        ("3 collective-measurement bound", c3_optimal_bound(&ctx)),
        (
            "4 closed-form objective vs quadrature",
            c4_objective_quadrature(),
        ),
        ("5 MLE vs dense lattice", c5_mle_oracle()),
        ("6 measurement-model identities", c6_measurement_model()),
        (
            "7 reference multiplicity <= 16",
            c7_reference_multiplicity(&ctx),
        ),
        ("8 estimate convergence", c8_convergence(&ctx)),
        ("9 reference hemisphere bias", c9_reference_bias(&ctx)),
        ("10 determinism", c10_determinism()),
        ("R snapshot regression values", regression_snapshots(&ctx)),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        println!(
            "{}  criterion {name}: {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        );
        failed += usize::from(!r.passed);
    }
    println!(
        "{} of {} criteria passed in {:.1?}",
        results.len() - failed,
        results.len(),
        started.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
