//! Adaptive estimation of a pure qubit from symmetry measurements.
//!
//! Each of `N` copies of an unknown qubit is compared against a known
//! reference state by projecting the pair onto the antisymmetric or symmetric
//! exchange subspace. The state is estimated by maximum likelihood, and the
//! reference for the next copy is either random or chosen to maximize the
//! expected fidelity after the next outcome.
//!
//! Modules, bottom-up: [`bloch`] (geometry), [`measurement`] (outcome model
//! and sampling), [`likelihood`] (MLE), [`strategy`] (reference selection),
//! [`harness`] (Monte Carlo experiments). [`oracle`] holds independent
//! reference computations used by tests and the `verify` command.

pub mod bloch;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod harness;
pub mod likelihood;
pub mod measurement;
pub mod oracle;
pub mod stats;
pub mod strategy;
#[cfg(feature = "cli")]
pub mod verify;

pub use bloch::{
    fidelity, make_sphere_grid, rotation_to_north_pole, Qubit, Rotation, SphereGrid, UnitVector3,
};
pub use error::{Error, Result};
pub use harness::{
    rotated_snapshot, run_experiment, run_trial, Experiment, ExperimentConfig, ExperimentOutput,
    FidelityCurve, SnapshotDistribution, StrategyName, TrialResult,
};
pub use likelihood::{
    log_likelihood, mle_estimate, MeasurementRecord, MeasurementSequence, MleResult,
};
pub use measurement::{p_antisymmetric, p_symmetric, sample_outcome, Outcome, RngStream};
pub use strategy::{
    expected_fidelity_objective, next_reference_adaptive, next_reference_random, AdaptivePolicy,
    StrategyKind,
};
