//! wasm-bindgen exports for the browser demo in `www/`.
//!
//! Every export takes plain arguments and returns a JSON string. The
//! `*_json` functions carry the logic so they can be tested natively.

use serde::{Deserialize, Serialize};
use symest::{
    rotation_to_north_pole, run_experiment, run_trial, AdaptivePolicy, ExperimentConfig,
    MeasurementRecord, MeasurementSequence, Outcome, Qubit, StrategyName, UnitVector3,
};
use wasm_bindgen::prelude::*;

const MAX_GRID: usize = 4096;

#[derive(Deserialize)]
struct HistoryEntry {
    outcome: Outcome,
    theta: f64,
    phi: f64,
}

#[derive(Serialize)]
struct Angles {
    theta: f64,
    phi: f64,
}

impl From<Qubit> for Angles {
    fn from(q: Qubit) -> Self {
        Angles {
            theta: q.theta(),
            phi: q.phi(),
        }
    }
}

#[derive(Serialize)]
struct ObjectivePoint {
    point: UnitVector3,
    value: f64,
}

#[derive(Serialize)]
struct ObjectiveMap {
    points: Vec<ObjectivePoint>,
    best: Angles,
    best_value: f64,
}

#[derive(Serialize)]
struct TrialStep {
    outcome: Outcome,
    reference: UnitVector3,
    estimate: UnitVector3,
    fidelity: f64,
}

#[derive(Serialize)]
struct TrialView {
    true_state: Angles,
    steps: Vec<TrialStep>,
}

#[derive(Serialize)]
struct CurveRow {
    n: usize,
    mean_fidelity: f64,
    std_error: f64,
    optimal_bound: f64,
}

fn parse_strategy(name: &str) -> Result<StrategyName, String> {
    match name {
        "adaptive" => Ok(StrategyName::Adaptive),
        "random" => Ok(StrategyName::Random),
        other => Err(format!("unknown strategy {other:?}")),
    }
}

fn check_grid(name: &str, n: usize) -> Result<(), String> {
    if n > MAX_GRID {
        return Err(format!("{name} {n} exceeds {MAX_GRID}"));
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Lookahead objective over the search grid for the next reference.
///
/// `history` is a JSON array of `{"outcome": "a"|"s", "theta", "phi"}`.
pub fn objective_map_json(
    history: &str,
    search_grid: usize,
    hyp_grid: usize,
) -> Result<String, String> {
    check_grid("search grid", search_grid)?;
    check_grid("hypothetical grid", hyp_grid)?;
    let entries: Vec<HistoryEntry> = serde_json::from_str(history).map_err(|e| e.to_string())?;
    let seq = entries
        .into_iter()
        .map(|e| {
            Ok(MeasurementRecord::new(
                e.outcome,
                Qubit::new(e.theta, e.phi).map_err(|e| e.to_string())?,
            ))
        })
        .collect::<Result<MeasurementSequence, String>>()?;
    let policy = AdaptivePolicy::new(search_grid, hyp_grid).map_err(|e| e.to_string())?;
    let best = policy.next_reference(&seq);
    let scan = policy.objective_scan(&seq);
    let best_value = scan
        .iter()
        .map(|v| v.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let points = scan
        .into_iter()
        .map(|v| ObjectivePoint {
            point: v.candidate.to_unit_vector(),
            value: v.value,
        })
        .collect();
    to_json(&ObjectiveMap {
        points,
        best: best.into(),
        best_value,
    })
}

/// One simulated trial with references and estimates rotated so the true
/// state sits at the north pole.
pub fn simulate_trial_json(
    strategy: &str,
    n_max: usize,
    seed: u64,
    trial: usize,
) -> Result<String, String> {
    let config = ExperimentConfig {
        strategy: parse_strategy(strategy)?,
        n_max,
        trials: trial + 1,
        seed,
        snapshot_steps: Vec::new(),
        ..ExperimentConfig::default()
    };
    let result = run_trial(&config, trial).map_err(|e| e.to_string())?;
    let rot = rotation_to_north_pole(&result.true_state);
    let steps = result
        .records
        .records()
        .iter()
        .zip(&result.estimates)
        .zip(&result.fidelities)
        .map(|((rec, est), &fidelity)| TrialStep {
            outcome: rec.outcome,
            reference: rot.apply(&rec.reference.to_unit_vector()),
            estimate: rot.apply(&est.to_unit_vector()),
            fidelity,
        })
        .collect();
    to_json(&TrialView {
        true_state: result.true_state.into(),
        steps,
    })
}

/// Mean fidelity per step over `trials` simulated runs.
pub fn fidelity_curve_json(
    strategy: &str,
    n_max: usize,
    trials: usize,
    seed: u64,
) -> Result<String, String> {
    let config = ExperimentConfig {
        strategy: parse_strategy(strategy)?,
        n_max,
        trials,
        seed,
        snapshot_steps: Vec::new(),
        ..ExperimentConfig::default()
    };
    let out = run_experiment(&config).map_err(|e| e.to_string())?;
    let rows: Vec<CurveRow> = out
        .curve
        .rows
        .iter()
        .map(|r| CurveRow {
            n: r.n,
            mean_fidelity: r.mean_fidelity,
            std_error: r.std_error,
            optimal_bound: r.optimal_bound,
        })
        .collect();
    to_json(&rows)
}

#[wasm_bindgen(js_name = objectiveMap)]
pub fn objective_map(
    history: &str,
    search_grid: usize,
    hyp_grid: usize,
) -> Result<String, JsValue> {
    objective_map_json(history, search_grid, hyp_grid).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = simulateTrial)]
pub fn simulate_trial(
    strategy: &str,
    n_max: usize,
    seed: u32,
    trial: usize,
) -> Result<String, JsValue> {
    simulate_trial_json(strategy, n_max, u64::from(seed), trial).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = fidelityCurve)]
pub fn fidelity_curve(
    strategy: &str,
    n_max: usize,
    trials: usize,
    seed: u32,
) -> Result<String, JsValue> {
    fidelity_curve_json(strategy, n_max, trials, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}
