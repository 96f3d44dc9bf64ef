//! Monte Carlo experiments.
//!
//! Each trial draws a Haar-random unknown state from its own RNG stream,
//! measures `n_max` copies against references chosen by the strategy, and
//! re-estimates the state after every measurement. Averaging the per-step
//! fidelities over trials gives the mean estimation fidelity curve.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::bloch::{
    fidelity, make_sphere_grid, rotation_to_north_pole, Qubit, SphereGrid, UnitVector3,
};
use crate::error::{Error, Result};
use crate::likelihood::{mle_from_table, GridLikelihood, MeasurementRecord, MeasurementSequence};
use crate::measurement::{sample_outcome, RngStream};
use crate::stats::{ks_test, mean_and_std_error, KsResult};
use crate::strategy::{
    haar_random_qubit, AdaptivePolicy, StrategyKind, DEFAULT_HYPOTHETICAL_GRID, DEFAULT_SEARCH_GRID,
};

pub const DEFAULT_MLE_GRID: usize = 1024;
pub const HISTOGRAM_BINS: usize = 40;

/// Which reference policy an experiment uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[cfg_attr(feature = "cli", derive(clap::ValueEnum))]
pub enum StrategyName {
    Random,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub strategy: StrategyName,
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub mle_grid: usize,
    pub search_grid: usize,
    pub hyp_grid: usize,
    pub snapshot_steps: Vec<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            strategy: StrategyName::Adaptive,
            n_max: 20,
            trials: 10_000,
            seed: 42,
            mle_grid: DEFAULT_MLE_GRID,
            search_grid: DEFAULT_SEARCH_GRID,
            hyp_grid: DEFAULT_HYPOTHETICAL_GRID,
            snapshot_steps: vec![1, 5, 20],
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.n_max < 1 {
            return bad(format!("n_max must be at least 1, got {}", self.n_max));
        }
        if self.trials < 1 {
            return bad(format!("trials must be at least 1, got {}", self.trials));
        }
        for (name, v) in [
            ("mle_grid", self.mle_grid),
            ("search_grid", self.search_grid),
            ("hyp_grid", self.hyp_grid),
        ] {
            if v < 2 {
                return bad(format!("{name} must be at least 2, got {v}"));
            }
        }
        if let Some(s) = self
            .snapshot_steps
            .iter()
            .find(|&&s| s < 1 || s > self.n_max)
        {
            return bad(format!("snapshot step {s} outside [1, {}]", self.n_max));
        }
        Ok(())
    }
}

/// Everything recorded for one simulated run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial_index: usize,
    pub true_state: Qubit,
    pub records: MeasurementSequence,
    /// `estimates[ν]` is the estimate after `ν + 1` measurements.
    pub estimates: Vec<Qubit>,
    pub fidelities: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityRow {
    pub n: usize,
    pub mean_fidelity: f64,
    pub std_error: f64,
    pub optimal_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityCurve {
    pub rows: Vec<FidelityRow>,
}

/// Best mean fidelity attainable with collective measurements on `n` copies.
pub fn optimal_fidelity(n: usize) -> f64 {
    (n as f64 + 1.0) / (n as f64 + 2.0)
}

impl FidelityCurve {
    pub fn from_trials(trials: &[TrialResult]) -> FidelityCurve {
        let n_max = trials.first().map_or(0, |t| t.fidelities.len());
        let rows = (0..n_max)
            .map(|step| {
                let column: Vec<f64> = trials.iter().map(|t| t.fidelities[step]).collect();
                let (mean_fidelity, std_error) = mean_and_std_error(&column);
                FidelityRow {
                    n: step + 1,
                    mean_fidelity,
                    std_error,
                    optimal_bound: optimal_fidelity(step + 1),
                }
            })
            .collect();
        FidelityCurve { rows }
    }

    pub fn row(&self, n: usize) -> Option<&FidelityRow> {
        self.rows.get(n.checked_sub(1)?)
    }
}

/// A point in the frame where the trial's true state sits at the north pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedPoint {
    pub cos_theta: f64,
    pub phi: f64,
}

impl RotatedPoint {
    fn from_vector(v: &UnitVector3) -> Self {
        let phi = v.y.atan2(v.x).rem_euclid(std::f64::consts::TAU);
        RotatedPoint {
            cos_theta: v.z.clamp(-1.0, 1.0),
            phi: if phi >= std::f64::consts::TAU {
                0.0
            } else {
                phi
            },
        }
    }
}

/// Fixed-width histogram over `[lo, hi]`; the top edge belongs to the last bin.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize, values: impl IntoIterator<Item = f64>) -> Self {
        let mut counts = vec![0; bins];
        let width = (hi - lo) / bins as f64;
        for v in values {
            let idx = (((v - lo) / width).floor().max(0.0) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Histogram { lo, hi, counts }
    }

    pub fn bin_edges(&self, bin: usize) -> (f64, f64) {
        let width = (self.hi - self.lo) / self.counts.len() as f64;
        (
            self.lo + bin as f64 * width,
            self.lo + (bin + 1) as f64 * width,
        )
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Index of the fullest bin (lowest on ties).
    pub fn mode(&self) -> usize {
        self.counts.iter().enumerate().fold(
            0,
            |best, (i, &c)| if c > self.counts[best] { i } else { best },
        )
    }
}

/// Estimates and references at one step, seen from each trial's true state.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotDistribution {
    pub step: usize,
    pub estimates: Vec<RotatedPoint>,
    pub references: Vec<RotatedPoint>,
    pub estimate_histogram: Histogram,
    pub reference_histogram: Histogram,
}

impl SnapshotDistribution {
    /// Fraction of rotated estimates with `cosθ` above `threshold`.
    pub fn estimate_fraction_above(&self, threshold: f64) -> f64 {
        let hits = self
            .estimates
            .iter()
            .filter(|p| p.cos_theta > threshold)
            .count();
        hits as f64 / self.estimates.len() as f64
    }
}

pub fn rotated_snapshot(trials: &[TrialResult], step: usize) -> Result<SnapshotDistribution> {
    let n_max = trials.iter().map(|t| t.estimates.len()).min().unwrap_or(0);
    if step < 1 || step > n_max {
        return Err(Error::InvalidInput(format!(
            "snapshot step {step} outside [1, {n_max}]"
        )));
    }
    let (estimates, references): (Vec<_>, Vec<_>) = trials
        .iter()
        .map(|t| {
            let rot = rotation_to_north_pole(&t.true_state);
            let e = rot.apply(&t.estimates[step - 1].to_unit_vector());
            let r = rot.apply(&t.records.records()[step - 1].reference.to_unit_vector());
            (RotatedPoint::from_vector(&e), RotatedPoint::from_vector(&r))
        })
        .unzip();
    let hist = |pts: &[RotatedPoint]| {
        Histogram::new(-1.0, 1.0, HISTOGRAM_BINS, pts.iter().map(|p| p.cos_theta))
    };
    Ok(SnapshotDistribution {
        step,
        estimate_histogram: hist(&estimates),
        reference_histogram: hist(&references),
        estimates,
        references,
    })
}

/// Truncated-exponential model for rotated `cosθ` values:
/// density ∝ `exp(rate · (c − 1))` on `[−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialTailFit {
    pub rate: f64,
    pub ks: KsResult,
}

/// Maximum-likelihood fit of the truncated exponential to `cosθ` samples.
pub fn exponential_tail_fit(points: &[RotatedPoint]) -> Option<ExponentialTailFit> {
    if points.is_empty() {
        return None;
    }
    let cos: Vec<f64> = points.iter().map(|p| p.cos_theta).collect();
    let mean_gap = cos.iter().map(|c| 1.0 - c).sum::<f64>() / cos.len() as f64;
    // Mean of (1 − c) under the model is 1/λ − 2/(e^{2λ} − 1), decreasing in λ.
    let model_gap = |rate: f64| 1.0 / rate - 2.0 / (2.0 * rate).exp_m1();
    if mean_gap.is_nan() || mean_gap <= 0.0 || mean_gap >= 1.0 {
        return None;
    }
    let (mut lo, mut hi) = (1e-9_f64, 1e6_f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if model_gap(mid) > mean_gap {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rate = (lo * hi).sqrt();
    let norm = -(-2.0 * rate).exp_m1();
    let ks = ks_test(&cos, |c| {
        (((rate * (c.clamp(-1.0, 1.0) - 1.0)).exp() - (-2.0 * rate).exp()) / norm).clamp(0.0, 1.0)
    });
    Some(ExponentialTailFit { rate, ks })
}

/// A configuration with its grids and policy built, ready to run trials.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    mle_grid: SphereGrid,
    strategy: StrategyKind,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub curve: FidelityCurve,
    pub snapshots: Vec<SnapshotDistribution>,
    pub trials: Vec<TrialResult>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let strategy = match config.strategy {
            StrategyName::Random => StrategyKind::RandomUniform,
            StrategyName::Adaptive => StrategyKind::AdaptiveExpectedFidelity(AdaptivePolicy::new(
                config.search_grid,
                config.hyp_grid,
            )?),
        };
        Ok(Experiment {
            mle_grid: make_sphere_grid(config.mle_grid)?,
            config,
            strategy,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn strategy(&self) -> &StrategyKind {
        &self.strategy
    }

    /// One trial; a pure function of `(config, trial_index)`.
    pub fn run_trial(&self, trial_index: usize) -> TrialResult {
        let n_max = self.config.n_max;
        let mut rng = RngStream::for_trial(self.config.seed, trial_index as u64);
        let true_state = haar_random_qubit(&mut rng);

        let mut records = MeasurementSequence::new();
        let mut factors = Vec::with_capacity(n_max);
        let mut table = GridLikelihood::new(&self.mle_grid);
        let mut estimates = Vec::with_capacity(n_max);
        let mut fidelities = Vec::with_capacity(n_max);
        for _ in 0..n_max {
            let reference = self.strategy.next_reference(&records, &mut rng);
            let outcome = sample_outcome(&true_state, &reference, &mut rng);
            let record = MeasurementRecord::new(outcome, reference);
            let factor = record.factor();
            records.push(record);
            table.push_factor(&factor);
            factors.push(factor);
            let mle = mle_from_table(&factors, &table);
            fidelities.push(fidelity(&mle.estimate, &true_state));
            estimates.push(mle.estimate);
        }
        TrialResult {
            trial_index,
            true_state,
            records,
            estimates,
            fidelities,
        }
    }

    /// All trials, ordered by trial index regardless of scheduling.
    pub fn run_trials(&self) -> Vec<TrialResult> {
        #[cfg(feature = "parallel")]
        {
            (0..self.config.trials)
                .into_par_iter()
                .map(|i| self.run_trial(i))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..self.config.trials).map(|i| self.run_trial(i)).collect()
        }
    }

    pub fn run(&self) -> Result<ExperimentOutput> {
        let trials = self.run_trials();
        let curve = FidelityCurve::from_trials(&trials);
        let snapshots = self
            .config
            .snapshot_steps
            .iter()
            .map(|&s| rotated_snapshot(&trials, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExperimentOutput {
            curve,
            snapshots,
            trials,
        })
    }
}

pub fn run_trial(config: &ExperimentConfig, trial_index: usize) -> Result<TrialResult> {
    if trial_index >= config.trials {
        return Err(Error::InvalidInput(format!(
            "trial index {trial_index} outside [0, {})",
            config.trials
        )));
    }
    Ok(Experiment::new(config.clone())?.run_trial(trial_index))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    Experiment::new(config.clone())?.run()
}
