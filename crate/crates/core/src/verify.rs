//! Oracle checks run by `symest verify`.
//!
//! Each check compares a production code path against an independent route
//! from [`crate::oracle`] at reduced scale. Setting
//! [`VerifyOptions::inject_sign_error`] flips the sign of the closed-form
//! lookahead objective before it is compared, which must make the objective
//! checks fail.

use std::f64::consts::PI;

use crate::bloch::{make_sphere_grid, Qubit};
use crate::harness::{run_experiment, ExperimentConfig, StrategyName};
use crate::likelihood::{mle_estimate, MeasurementRecord, MeasurementSequence};
use crate::measurement::{p_antisymmetric, p_symmetric, sample_outcome, Outcome, RngStream};
use crate::oracle;
use crate::strategy::{
    expected_fidelity_objective, haar_random_qubit, hypothetical_estimates,
    objective_from_estimates,
};

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub seed: u64,
    pub inject_sign_error: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check {
            name,
            passed,
            detail,
        }
    }
}

pub fn run_checks(opts: &VerifyOptions) -> Vec<Check> {
    vec![
        measurement_properties(opts.seed),
        sampling_frequency("sampling_p_half", Qubit::ZERO, Qubit::ONE, opts.seed),
        sampling_frequency(
            "sampling_p_quarter",
            Qubit::new(PI / 2.0, 0.0).expect("valid"),
            Qubit::ZERO,
            opts.seed,
        ),
        grid_spacing(),
        objective_empty_history(opts),
        objective_quadrature(opts),
        mle_dense_oracle(opts.seed),
        mle_two_antisymmetric(),
        single_step_fidelity(opts.seed),
    ]
}

fn analytic(opts: &VerifyOptions, c: &Qubit, e_a: &Qubit, e_s: &Qubit) -> f64 {
    let v = objective_from_estimates(
        &c.to_unit_vector(),
        &e_a.to_unit_vector(),
        &e_s.to_unit_vector(),
    );
    if opts.inject_sign_error {
        1.0 - v
    } else {
        v
    }
}

fn random_history(rng: &mut RngStream, max_len: usize) -> MeasurementSequence {
    let len = (rng.uniform() * (max_len + 1) as f64) as usize;
    (0..len)
        .map(|_| {
            let o = if rng.uniform() < 0.35 {
                Outcome::Antisymmetric
            } else {
                Outcome::Symmetric
            };
            MeasurementRecord::new(o, haar_random_qubit(rng))
        })
        .collect()
}

fn measurement_properties(seed: u64) -> Check {
    let mut rng = RngStream::for_trial(seed, 1);
    let mut worst_forms = 0.0f64;
    let mut ok = true;
    for _ in 0..10_000 {
        let a = haar_random_qubit(&mut rng);
        let b = haar_random_qubit(&mut rng);
        let pa = p_antisymmetric(&a, &b);
        ok &= pa + p_symmetric(&a, &b) == 1.0;
        ok &= (0.0..=0.5).contains(&pa);
        ok &= p_antisymmetric(&a, &a) == 0.0;
        ok &= (p_antisymmetric(&a, &a.antipode()) - 0.5).abs() < 1e-12;
        worst_forms = worst_forms.max((pa - oracle::p_antisymmetric_trig(&a, &b)).abs());
    }
    ok &= worst_forms < 1e-12;
    Check::new(
        "measurement_properties",
        ok,
        format!("max |dot form - trig form| = {worst_forms:.3e} over 10^4 pairs"),
    )
}

fn sampling_frequency(name: &'static str, psi: Qubit, reference: Qubit, seed: u64) -> Check {
    let exact = oracle::p_antisymmetric_trig(&psi, &reference);
    let mut rng = RngStream::for_trial(seed, 2);
    let draws = 100_000;
    let hits = (0..draws)
        .filter(|_| sample_outcome(&psi, &reference, &mut rng) == Outcome::Antisymmetric)
        .count();
    let freq = hits as f64 / draws as f64;
    Check::new(
        name,
        (freq - exact).abs() < 0.005,
        format!("frequency {freq:.5} vs p_a {exact:.5} (10^5 draws)"),
    )
}

fn grid_spacing() -> Check {
    let grid = make_sphere_grid(1024).expect("valid resolution");
    let pts = grid.points();
    let worst = pts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            pts.iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| p.angle_to(q))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Check::new(
        "grid_nearest_neighbour",
        worst < 0.25,
        format!("largest nearest-neighbour angle {worst:.4} rad at 1024 points"),
    )
}

fn objective_empty_history(opts: &VerifyOptions) -> Check {
    let grid = make_sphere_grid(256).expect("valid resolution");
    let mut rng = RngStream::for_trial(opts.seed, 3);
    let empty = MeasurementSequence::new();
    let mut worst = 0.0f64;
    for _ in 0..8 {
        let c = haar_random_qubit(&mut rng);
        let (e_a, e_s) = hypothetical_estimates(&empty, &c, &grid).expect("nonempty grid");
        let q = oracle::objective_quadrature(&c, &e_a, &e_s);
        let v = analytic(opts, &c, &e_a, &e_s);
        worst = worst.max((v - 7.0 / 12.0).abs()).max((v - q).abs());
    }
    Check::new(
        "objective_empty_history",
        worst < 1e-6,
        format!("max deviation from 7/12 and from quadrature {worst:.3e}"),
    )
}

fn objective_quadrature(opts: &VerifyOptions) -> Check {
    let grid = make_sphere_grid(256).expect("valid resolution");
    let mut rng = RngStream::for_trial(opts.seed, 4);
    let mut worst = 0.0f64;
    let mut consistent = true;
    for _ in 0..100 {
        let history = random_history(&mut rng, 4);
        let c = haar_random_qubit(&mut rng);
        let (e_a, e_s) = hypothetical_estimates(&history, &c, &grid).expect("nonempty grid");
        let v = analytic(opts, &c, &e_a, &e_s);
        let direct = expected_fidelity_objective(&history, &c, &grid).expect("nonempty grid");
        consistent &= direct.value
            == objective_from_estimates(
                &c.to_unit_vector(),
                &e_a.to_unit_vector(),
                &e_s.to_unit_vector(),
            );
        worst = worst.max((v - oracle::objective_quadrature(&c, &e_a, &e_s)).abs());
    }
    Check::new(
        "objective_vs_quadrature",
        consistent && worst < 1e-6,
        format!("max |closed form - quadrature| = {worst:.3e} over 100 pairs"),
    )
}

fn mle_dense_oracle(seed: u64) -> Check {
    let grid = make_sphere_grid(1024).expect("valid resolution");
    let mut rng = RngStream::for_trial(seed, 5);
    let mut worst_shortfall = f64::NEG_INFINITY;
    for _ in 0..25 {
        let mut history = random_history(&mut rng, 4);
        history.push(MeasurementRecord::new(
            Outcome::Symmetric,
            haar_random_qubit(&mut rng),
        ));
        let mle = mle_estimate(&history, &grid).expect("nonempty grid");
        let (_, dense) = oracle::dense_lattice_mle(&history, 1000, 1000);
        worst_shortfall = worst_shortfall.max(dense - mle.log_likelihood);
    }
    Check::new(
        "mle_vs_dense_lattice",
        worst_shortfall <= 1e-4,
        format!("max (dense max - estimator) = {worst_shortfall:.3e} over 25 sequences"),
    )
}

fn mle_two_antisymmetric() -> Check {
    let grid = make_sphere_grid(1024).expect("valid resolution");
    let seq: MeasurementSequence = [
        MeasurementRecord::new(Outcome::Antisymmetric, Qubit::ZERO),
        MeasurementRecord::new(
            Outcome::Antisymmetric,
            Qubit::new(PI / 2.0, 0.0).expect("valid"),
        ),
    ]
    .into_iter()
    .collect();
    let mle = mle_estimate(&seq, &grid).expect("nonempty grid");
    let (dense, _) = oracle::dense_lattice_mle(&seq, 1000, 1000);
    let angle = mle
        .estimate
        .to_unit_vector()
        .angle_to(&dense.to_unit_vector());
    Check::new(
        "mle_two_antisymmetric",
        angle < 2e-2,
        format!("estimate within {angle:.3e} rad of dense-lattice argmax"),
    )
}

fn single_step_fidelity(seed: u64) -> Check {
    let exact = oracle::single_step_mean_fidelity();
    let mut details = Vec::new();
    let mut ok = (exact - 7.0 / 12.0).abs() < 1e-14;
    for strategy in [StrategyName::Adaptive, StrategyName::Random] {
        let cfg = ExperimentConfig {
            strategy,
            n_max: 1,
            trials: 10_000,
            seed,
            snapshot_steps: vec![1],
            ..ExperimentConfig::default()
        };
        let out = run_experiment(&cfg).expect("valid config");
        let mean = out.curve.rows[0].mean_fidelity;
        ok &= (mean - exact).abs() < 0.01;
        details.push(format!("{strategy:?} {mean:.4}"));
    }
    Check::new(
        "single_step_fidelity",
        ok,
        format!("<F_1> {} vs 7/12 = {exact:.4}", details.join(", ")),
    )
}
