//! Reference-state selection.
//!
//! Two policies: Haar-random references (the non-adaptive baseline), and a
//! one-step lookahead that picks the reference maximizing the expected
//! fidelity after the next measurement.
//!
//! For a candidate reference `c` with hypothetical estimates `e_a` and `e_s`
//! (the MLE after appending an `a` or `s` outcome at `c`), the expected
//! fidelity averaged uniformly over the unknown state is
//!
//! ```text
//! ∫ dΩ [ p_a(c, n) (1 + e_a·n)/2 + p_s(c, n) (1 + e_s·n)/2 ]
//!   = 1/2 + c·(e_s − e_a) / 24
//! ```
//!
//! using `∫ n dΩ = 0` and `∫ (a·n)(b·n) dΩ = a·b / 3`.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::bloch::{make_sphere_grid, Qubit, SphereGrid, UnitVector3};
use crate::error::Result;
use crate::likelihood::{
    argmax_lowest, mle_estimate, mle_from_start, Factor, GridLikelihood, MeasurementRecord,
    MeasurementSequence,
};
use crate::measurement::{log_prob, Outcome, RngStream};

/// Runtime reference-selection policy.
#[derive(Debug, Clone)]
pub enum StrategyKind {
    RandomUniform,
    AdaptiveExpectedFidelity(AdaptivePolicy),
}

impl StrategyKind {
    /// Next reference given the history so far. The random policy consumes two
    /// draws from `rng`; the adaptive one consumes none.
    pub fn next_reference(&self, history: &MeasurementSequence, rng: &mut RngStream) -> Qubit {
        match self {
            StrategyKind::RandomUniform => next_reference_random(rng),
            StrategyKind::AdaptiveExpectedFidelity(policy) => policy.next_reference(history),
        }
    }
}

/// Lookahead objective evaluated at one candidate reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptionObjectiveValue {
    pub value: f64,
    pub candidate: Qubit,
}

/// Haar-uniform state: `cosθ = 2u₁ − 1`, `φ = 2π u₂`.
pub fn haar_random_qubit(rng: &mut RngStream) -> Qubit {
    let z = 2.0 * rng.uniform() - 1.0;
    let phi = TAU * rng.uniform();
    Qubit::new(z.acos(), phi).expect("acos lies in [0, pi]")
}

pub fn next_reference_random(rng: &mut RngStream) -> Qubit {
    haar_random_qubit(rng)
}

/// Closed form of the sphere-averaged lookahead objective.
#[inline]
pub fn objective_from_estimates(
    candidate: &UnitVector3,
    estimate_a: &UnitVector3,
    estimate_s: &UnitVector3,
) -> f64 {
    0.5 + (candidate.dot(estimate_s) - candidate.dot(estimate_a)) / 24.0
}

/// Lookahead objective for `candidate`, solving both hypothetical MLEs on
/// `hypothetical_mle_grid`.
pub fn expected_fidelity_objective(
    history: &MeasurementSequence,
    candidate: &Qubit,
    hypothetical_mle_grid: &SphereGrid,
) -> Result<AdaptionObjectiveValue> {
    let (e_a, e_s) = hypothetical_estimates(history, candidate, hypothetical_mle_grid)?;
    Ok(AdaptionObjectiveValue {
        value: objective_from_estimates(
            &candidate.to_unit_vector(),
            &e_a.to_unit_vector(),
            &e_s.to_unit_vector(),
        ),
        candidate: *candidate,
    })
}

/// The two estimates the next measurement at `candidate` could lead to.
pub fn hypothetical_estimates(
    history: &MeasurementSequence,
    candidate: &Qubit,
    grid: &SphereGrid,
) -> Result<(Qubit, Qubit)> {
    let a = mle_estimate(
        &history.extended(MeasurementRecord::new(Outcome::Antisymmetric, *candidate)),
        grid,
    )?;
    let s = mle_estimate(
        &history.extended(MeasurementRecord::new(Outcome::Symmetric, *candidate)),
        grid,
    )?;
    Ok((a.estimate, s.estimate))
}

pub fn next_reference_adaptive(history: &MeasurementSequence, policy: &AdaptivePolicy) -> Qubit {
    policy.next_reference(history)
}

/// Default candidate-search and hypothetical-MLE grid sizes.
pub const DEFAULT_SEARCH_GRID: usize = 512;
pub const DEFAULT_HYPOTHETICAL_GRID: usize = 256;

type HistoryKey = Vec<(bool, u64, u64)>;

fn history_key(history: &MeasurementSequence) -> HistoryKey {
    history
        .records()
        .iter()
        .map(|r| {
            (
                r.outcome == Outcome::Antisymmetric,
                r.reference.theta().to_bits(),
                r.reference.phi().to_bits(),
            )
        })
        .collect()
}

/// One-step lookahead reference selection over fixed grids.
///
/// The chosen reference is a pure function of the history and the two grids.
/// Results are memoized per history; clones share the memo table.
#[derive(Clone)]
pub struct AdaptivePolicy {
    inner: Arc<PolicyInner>,
}

struct PolicyInner {
    search_grid: SphereGrid,
    hypothetical_grid: SphereGrid,
    candidates: Vec<Qubit>,
    candidate_vectors: Vec<UnitVector3>,
    /// `ln p_a` and `ln p_s` for (candidate, hypothetical grid point), row-major by candidate.
    log_a: Vec<f64>,
    log_s: Vec<f64>,
    memo: Mutex<HashMap<HistoryKey, Arc<OnceLock<Qubit>>>>,
}

impl fmt::Debug for AdaptivePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdaptivePolicy")
            .field("search_grid", &self.inner.search_grid.resolution())
            .field(
                "hypothetical_grid",
                &self.inner.hypothetical_grid.resolution(),
            )
            .finish()
    }
}

impl AdaptivePolicy {
    pub fn new(search_resolution: usize, hypothetical_resolution: usize) -> Result<Self> {
        Ok(Self::with_grids(
            make_sphere_grid(search_resolution)?,
            make_sphere_grid(hypothetical_resolution)?,
        ))
    }

    pub fn with_grids(search_grid: SphereGrid, hypothetical_grid: SphereGrid) -> Self {
        let candidates: Vec<Qubit> = search_grid
            .points()
            .iter()
            .map(|p| Qubit::from_vector_unchecked(*p))
            .collect();
        // Records carry the reference as a Qubit, so tabulate with the
        // vector that Qubit maps back to, not the raw grid point.
        let candidate_vectors: Vec<UnitVector3> =
            candidates.iter().map(Qubit::to_unit_vector).collect();
        let g = hypothetical_grid.resolution();
        let mut log_a = Vec::with_capacity(candidates.len() * g);
        let mut log_s = Vec::with_capacity(candidates.len() * g);
        for c in &candidate_vectors {
            for p in hypothetical_grid.points() {
                log_a.push(log_prob(Outcome::Antisymmetric, p, c));
                log_s.push(log_prob(Outcome::Symmetric, p, c));
            }
        }
        AdaptivePolicy {
            inner: Arc::new(PolicyInner {
                search_grid,
                hypothetical_grid,
                candidates,
                candidate_vectors,
                log_a,
                log_s,
                memo: Mutex::new(HashMap::new()),
            }),
        }
    }

    pub fn search_grid(&self) -> &SphereGrid {
        &self.inner.search_grid
    }

    pub fn hypothetical_grid(&self) -> &SphereGrid {
        &self.inner.hypothetical_grid
    }

    /// Search candidates as states, in grid order.
    pub fn candidates(&self) -> &[Qubit] {
        &self.inner.candidates
    }

    /// Next reference: `|0⟩` for an empty history, otherwise the search-grid
    /// candidate with the largest objective (lowest index on ties).
    pub fn next_reference(&self, history: &MeasurementSequence) -> Qubit {
        if history.is_empty() {
            return Qubit::ZERO;
        }
        let cell = {
            let mut memo = self.inner.memo.lock().expect("memo lock poisoned");
            memo.entry(history_key(history)).or_default().clone()
        };
        *cell.get_or_init(|| self.select(history))
    }

    /// Number of memoized histories.
    pub fn memo_len(&self) -> usize {
        self.inner.memo.lock().expect("memo lock poisoned").len()
    }

    fn select(&self, history: &MeasurementSequence) -> Qubit {
        let scan = self.objective_scan(history);
        let (idx, _) =
            argmax_lowest(scan.iter().map(|v| v.value)).expect("search grid is nonempty");
        self.inner.candidates[idx]
    }

    /// Objective at every search candidate, in grid order.
    ///
    /// Gives bit-identical values to calling [`expected_fidelity_objective`]
    /// per candidate: the history's grid table is built once and each
    /// candidate only adds its tabulated last factor.
    pub fn objective_scan(&self, history: &MeasurementSequence) -> Vec<AdaptionObjectiveValue> {
        let inner = &*self.inner;
        let grid = &inner.hypothetical_grid;
        let g = grid.resolution();
        let mut factors: Vec<Factor> = history.factors();
        let mut base = GridLikelihood::new(grid);
        for f in &factors {
            base.push_factor(f);
        }
        let base = base.values();
        let last = factors.len();
        factors.push(Factor {
            outcome: Outcome::Symmetric,
            reference: UnitVector3::NORTH,
        });

        let mut hypothetical = |c: usize, outcome: Outcome, table: &[f64]| {
            let row = &table[c * g..(c + 1) * g];
            let (idx, value) =
                argmax_lowest(base.iter().zip(row).map(|(b, t)| b + t)).expect("grid is nonempty");
            factors[last] = Factor {
                outcome,
                reference: inner.candidate_vectors[c],
            };
            mle_from_start(&factors, grid, idx, value)
                .estimate
                .to_unit_vector()
        };

        (0..inner.candidates.len())
            .map(|c| {
                let e_a = hypothetical(c, Outcome::Antisymmetric, &inner.log_a);
                let e_s = hypothetical(c, Outcome::Symmetric, &inner.log_s);
                AdaptionObjectiveValue {
                    value: objective_from_estimates(&inner.candidate_vectors[c], &e_a, &e_s),
                    candidate: inner.candidates[c],
                }
            })
            .collect()
    }
}
