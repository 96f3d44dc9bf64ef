//! The symmetry-measurement model.
//!
//! Comparing an unknown copy `|ψ⟩` with a reference `|r⟩` projects the product
//! state onto the antisymmetric (singlet) subspace with probability
//! `(1 − n_ψ·n_r) / 4`, and onto the symmetric subspace otherwise.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bloch::{Qubit, UnitVector3};

/// Result of one symmetry measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "a")]
    Antisymmetric,
    #[serde(rename = "s")]
    Symmetric,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Antisymmetric => "a",
            Outcome::Symmetric => "s",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Antisymmetric probability from the Bloch-vector overlap `n_ψ·n_r`.
#[inline]
pub fn p_antisymmetric_from_dot(dot: f64) -> f64 {
    (0.25 * (1.0 - dot.clamp(-1.0, 1.0))).clamp(0.0, 0.5)
}

#[inline]
pub fn prob_from_dot(outcome: Outcome, dot: f64) -> f64 {
    let pa = p_antisymmetric_from_dot(dot);
    match outcome {
        Outcome::Antisymmetric => pa,
        Outcome::Symmetric => 1.0 - pa,
    }
}

/// `ln p_outcome`; `-∞` when the probability is exactly zero.
#[inline]
pub fn log_prob_from_dot(outcome: Outcome, dot: f64) -> f64 {
    let p = prob_from_dot(outcome, dot);
    if p > 0.0 {
        p.ln()
    } else {
        f64::NEG_INFINITY
    }
}

#[inline]
pub(crate) fn log_prob(outcome: Outcome, state: &UnitVector3, reference: &UnitVector3) -> f64 {
    log_prob_from_dot(outcome, state.dot(reference))
}

pub fn p_antisymmetric(psi: &Qubit, reference: &Qubit) -> f64 {
    p_antisymmetric_from_dot(psi.bloch_overlap(reference))
}

pub fn p_symmetric(psi: &Qubit, reference: &Qubit) -> f64 {
    1.0 - p_antisymmetric(psi, reference)
}

pub fn outcome_probability(outcome: Outcome, psi: &Qubit, reference: &Qubit) -> f64 {
    match outcome {
        Outcome::Antisymmetric => p_antisymmetric(psi, reference),
        Outcome::Symmetric => p_symmetric(psi, reference),
    }
}

/// Deterministic random stream for one Monte Carlo trial.
///
/// ChaCha8 keyed by the master seed; each trial uses its own stream id, so a
/// trial's draws depend only on `(seed, stream)` and never on scheduling.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::for_trial(seed, 0)
    }

    pub fn for_trial(master_seed: u64, trial_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(trial_index);
        RngStream {
            seed: master_seed,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// One draw, uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }
}

/// Samples an outcome: draw `u ∈ [0, 1)`, antisymmetric iff `u < p_a`.
pub fn sample_outcome(psi: &Qubit, reference: &Qubit, rng: &mut RngStream) -> Outcome {
    if rng.uniform() < p_antisymmetric(psi, reference) {
        Outcome::Antisymmetric
    } else {
        Outcome::Symmetric
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::rotation_to_north_pole;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    /// Trigonometric form of the antisymmetric probability.
    fn p_a_trig(psi: &Qubit, r: &Qubit) -> f64 {
        0.25 * (1.0
            - psi.theta().cos() * r.theta().cos()
            - (psi.phi() - r.phi()).cos() * psi.theta().sin() * r.theta().sin())
    }

    #[test]
    fn probability_examples() {
        let psi = Qubit::new(0.8, 1.9).unwrap();
        assert_eq!(p_antisymmetric(&psi, &psi), 0.0);
        assert_eq!(p_symmetric(&psi, &psi), 1.0);
        assert_eq!(p_antisymmetric(&Qubit::ZERO, &Qubit::ONE), 0.5);
        assert_eq!(p_symmetric(&Qubit::ZERO, &Qubit::ONE), 0.5);
        let eq = Qubit::new(PI / 2.0, 0.0).unwrap();
        assert!((p_antisymmetric(&eq, &Qubit::ZERO) - 0.25).abs() < 1e-15);
        assert!((p_symmetric(&eq, &Qubit::ZERO) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn identical_states_always_symmetric() {
        let psi = Qubit::new(2.0, 5.0).unwrap();
        for seed in 0..200 {
            let mut rng = RngStream::new(seed);
            assert_eq!(sample_outcome(&psi, &psi, &mut rng), Outcome::Symmetric);
        }
    }

    fn frequency(psi: &Qubit, r: &Qubit, draws: usize, seed: u64) -> f64 {
        let mut rng = RngStream::new(seed);
        let hits = (0..draws)
            .filter(|_| sample_outcome(psi, r, &mut rng) == Outcome::Antisymmetric)
            .count();
        hits as f64 / draws as f64
    }

    #[test]
    fn sampling_frequencies_match_probabilities() {
        // Binomial standard deviation at p = 1/2 and 10^5 draws is 0.0016.
        let f = frequency(&Qubit::ZERO, &Qubit::ONE, 100_000, 7);
        assert!((f - 0.5).abs() < 0.005, "{f}");
        let eq = Qubit::new(PI / 2.0, 0.0).unwrap();
        let exact = p_antisymmetric(&eq, &Qubit::ZERO);
        let f = frequency(&eq, &Qubit::ZERO, 100_000, 8);
        assert!((f - exact).abs() < 0.005, "{f}");
    }

    #[test]
    fn sampling_consumes_one_draw() {
        let psi = Qubit::new(1.0, 1.0).unwrap();
        let mut a = RngStream::new(3);
        let mut b = RngStream::new(3);
        sample_outcome(&psi, &Qubit::ZERO, &mut a);
        b.uniform();
        assert_eq!(a.uniform(), b.uniform());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = RngStream::for_trial(42, 5);
        let mut b = RngStream::for_trial(42, 5);
        let mut c = RngStream::for_trial(42, 6);
        let xs: Vec<f64> = (0..8).map(|_| a.uniform()).collect();
        let ys: Vec<f64> = (0..8).map(|_| b.uniform()).collect();
        let zs: Vec<f64> = (0..8).map(|_| c.uniform()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }

    #[test]
    fn outcome_serializes_as_letter() {
        assert_eq!(Outcome::Antisymmetric.to_string(), "a");
        assert_eq!(Outcome::Symmetric.to_string(), "s");
    }

    #[test]
    fn trigonometric_and_dot_forms_agree() {
        let mut rng = RngStream::new(11);
        for _ in 0..10_000 {
            let a = Qubit::new((2.0 * rng.uniform() - 1.0).acos(), TAU * rng.uniform()).unwrap();
            let b = Qubit::new((2.0 * rng.uniform() - 1.0).acos(), TAU * rng.uniform()).unwrap();
            assert!((p_antisymmetric(&a, &b) - p_a_trig(&a, &b)).abs() < 1e-12);
        }
    }

    fn qubit() -> impl Strategy<Value = Qubit> {
        (-1.0f64..=1.0, 0.0f64..TAU).prop_map(|(z, phi)| Qubit::new(z.acos(), phi).unwrap())
    }

    proptest! {
        #[test]
        fn normalization_range_symmetry(a in qubit(), b in qubit()) {
            let pa = p_antisymmetric(&a, &b);
            prop_assert_eq!(pa + p_symmetric(&a, &b), 1.0);
            prop_assert!((0.0..=0.5).contains(&pa));
            prop_assert_eq!(pa, p_antisymmetric(&b, &a));
        }

        #[test]
        fn rotation_invariance(a in qubit(), b in qubit(), t in qubit()) {
            let r = rotation_to_north_pole(&t);
            let rotated = p_antisymmetric(&r.apply_qubit(&a), &r.apply_qubit(&b));
            prop_assert!((rotated - p_antisymmetric(&a, &b)).abs() < 1e-12);
        }
    }
}
