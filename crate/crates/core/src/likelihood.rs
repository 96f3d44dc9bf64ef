//! Likelihood of a measurement sequence and its maximum over the Bloch sphere.
//!
//! The likelihood is a product of outcome probabilities, one factor per
//! record. Everything here works with its logarithm so long sequences do not
//! underflow; a factor that is exactly zero makes the whole value `-∞`.

use serde::{Deserialize, Serialize};

use crate::bloch::{Qubit, SphereGrid, UnitVector3};
use crate::error::{Error, Result};
use crate::measurement::{log_prob, prob_from_dot, Outcome};

/// Local refinement stops once the accepted step falls below this angle.
pub const REFINE_TOLERANCE: f64 = 1e-4;

const MAX_REFINE_STEP: f64 = std::f64::consts::FRAC_PI_2;
const MAX_REFINE_ITERATIONS: usize = 200;

/// One measurement: the observed outcome and the reference it was compared to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub outcome: Outcome,
    pub reference: Qubit,
}

impl MeasurementRecord {
    pub fn new(outcome: Outcome, reference: Qubit) -> Self {
        MeasurementRecord { outcome, reference }
    }

    pub(crate) fn factor(&self) -> Factor {
        Factor {
            outcome: self.outcome,
            reference: self.reference.to_unit_vector(),
        }
    }
}

/// A record with its reference already mapped to a Bloch vector.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Factor {
    pub outcome: Outcome,
    pub reference: UnitVector3,
}

impl Factor {
    #[inline]
    pub fn log_prob(&self, state: &UnitVector3) -> f64 {
        log_prob(self.outcome, state, &self.reference)
    }
}

/// Ordered measurement history.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSequence {
    records: Vec<MeasurementRecord>,
}

impl MeasurementSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: MeasurementRecord) {
        self.records.push(record);
    }

    /// A copy of this sequence with one more record appended.
    pub fn extended(&self, record: MeasurementRecord) -> Self {
        let mut records = Vec::with_capacity(self.records.len() + 1);
        records.extend_from_slice(&self.records);
        records.push(record);
        MeasurementSequence { records }
    }

    pub fn records(&self) -> &[MeasurementRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub(crate) fn factors(&self) -> Vec<Factor> {
        self.records.iter().map(MeasurementRecord::factor).collect()
    }
}

impl FromIterator<MeasurementRecord> for MeasurementSequence {
    fn from_iter<I: IntoIterator<Item = MeasurementRecord>>(iter: I) -> Self {
        MeasurementSequence {
            records: iter.into_iter().collect(),
        }
    }
}

/// Maximum-likelihood estimate and the log-likelihood attained there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleResult {
    pub estimate: Qubit,
    pub log_likelihood: f64,
}

/// `Σ ln p_α(candidate, r)` over the sequence; `0` when empty.
pub fn log_likelihood(seq: &MeasurementSequence, candidate: &Qubit) -> f64 {
    let n = candidate.to_unit_vector();
    seq.records()
        .iter()
        .fold(0.0, |acc, r| acc + r.factor().log_prob(&n))
}

#[inline]
pub(crate) fn log_likelihood_factors(factors: &[Factor], n: &UnitVector3) -> f64 {
    factors.iter().fold(0.0, |acc, f| acc + f.log_prob(n))
}

/// Index and value of the largest entry; ties go to the lowest index.
/// All-`-∞` input returns index 0.
pub(crate) fn argmax_lowest(values: impl IntoIterator<Item = f64>) -> Option<(usize, f64)> {
    let mut it = values.into_iter().enumerate();
    let (_, first) = it.next()?;
    Some(it.fold(
        (0, first),
        |best, (i, v)| if v > best.1 { (i, v) } else { best },
    ))
}

/// Log-likelihood of a growing sequence tabulated over a fixed grid.
///
/// Adding records one at a time yields exactly the values a fresh scan of the
/// whole sequence would produce, since both accumulate factors in record order.
#[derive(Debug, Clone)]
pub struct GridLikelihood<'g> {
    grid: &'g SphereGrid,
    values: Vec<f64>,
}

impl<'g> GridLikelihood<'g> {
    pub fn new(grid: &'g SphereGrid) -> Self {
        GridLikelihood {
            grid,
            values: vec![0.0; grid.resolution()],
        }
    }

    pub fn push(&mut self, record: &MeasurementRecord) {
        self.push_factor(&record.factor());
    }

    pub(crate) fn push_factor(&mut self, factor: &Factor) {
        for (v, p) in self.values.iter_mut().zip(self.grid.points()) {
            *v += factor.log_prob(p);
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> &SphereGrid {
        self.grid
    }

    /// Best grid point, lowest index on ties.
    pub fn best(&self) -> Option<(usize, f64)> {
        argmax_lowest(self.values.iter().copied())
    }
}

/// Maximum-likelihood estimate: grid scan, then local refinement from the
/// best grid point.
pub fn mle_estimate(seq: &MeasurementSequence, grid: &SphereGrid) -> Result<MleResult> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty sphere grid".into()));
    }
    let factors = seq.factors();
    let mut table = GridLikelihood::new(grid);
    for f in &factors {
        table.push_factor(f);
    }
    Ok(mle_from_table(&factors, &table))
}

pub(crate) fn mle_from_table(factors: &[Factor], table: &GridLikelihood<'_>) -> MleResult {
    let (idx, value) = table.best().expect("grid is nonempty");
    mle_from_start(factors, table.grid(), idx, value)
}

pub(crate) fn mle_from_start(
    factors: &[Factor],
    grid: &SphereGrid,
    start_index: usize,
    start_value: f64,
) -> MleResult {
    let start = grid.points()[start_index];
    let (n, value) = refine(factors, start, start_value, 0.5 * grid.spacing());
    MleResult {
        estimate: Qubit::from_vector_unchecked(n),
        log_likelihood: value,
    }
}

/// Ascends the log-likelihood on the sphere from `start`.
///
/// Each iteration works in the tangent plane at the current point: a Newton
/// step when the Riemannian Hessian is negative definite, otherwise a gradient
/// step of length `fallback_step`. Steps are halved until they improve the
/// value; the search ends once the accepted step is below
/// [`REFINE_TOLERANCE`] or no step of at least that size improves.
/// The returned value is never below `start_value`.
pub(crate) fn refine(
    factors: &[Factor],
    start: UnitVector3,
    start_value: f64,
    fallback_step: f64,
) -> (UnitVector3, f64) {
    let mut n = start;
    let mut value = start_value;
    if factors.is_empty() || !value.is_finite() {
        return (n, value);
    }
    for _ in 0..MAX_REFINE_ITERATIONS {
        let (t1, t2) = tangent_basis(&n);
        let (mut g1, mut g2, mut radial) = (0.0, 0.0, 0.0);
        let (mut h11, mut h12, mut h22) = (0.0, 0.0, 0.0);
        for f in factors {
            let x = n.dot(&f.reference);
            let p = prob_from_dot(f.outcome, x);
            let slope = match f.outcome {
                Outcome::Antisymmetric => -0.25,
                Outcome::Symmetric => 0.25,
            };
            let w = slope / p;
            let a1 = t1.dot(&f.reference);
            let a2 = t2.dot(&f.reference);
            g1 += w * a1;
            g2 += w * a2;
            radial += w * x;
            let w2 = w * w;
            h11 -= w2 * a1 * a1;
            h12 -= w2 * a1 * a2;
            h22 -= w2 * a2 * a2;
        }
        h11 -= radial;
        h22 -= radial;
        let grad_norm = g1.hypot(g2);
        if grad_norm.is_nan() || grad_norm <= 1e-13 {
            break;
        }
        let det = h11 * h22 - h12 * h12;
        let (d1, d2) = if h11 < 0.0 && det > 0.0 {
            (-(h22 * g1 - h12 * g2) / det, -(h11 * g2 - h12 * g1) / det)
        } else {
            (
                fallback_step * g1 / grad_norm,
                fallback_step * g2 / grad_norm,
            )
        };
        let len = d1.hypot(d2);
        if !len.is_finite() || len <= 0.0 {
            break;
        }
        let dir = t1.scale(d1 / len).add(&t2.scale(d2 / len));
        let mut step = len.min(MAX_REFINE_STEP);
        let mut accepted = None;
        while step >= 0.5 * REFINE_TOLERANCE {
            let trial = along_geodesic(&n, &dir, step);
            let v = log_likelihood_factors(factors, &trial);
            if v > value {
                accepted = Some((trial, v));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, v)) => {
                n = trial;
                value = v;
                if step < REFINE_TOLERANCE {
                    break;
                }
            }
            None => break,
        }
    }
    (n, value)
}

fn tangent_basis(n: &UnitVector3) -> (UnitVector3, UnitVector3) {
    let helper = if n.z.abs() < 0.9 {
        UnitVector3::raw(0.0, 0.0, 1.0)
    } else {
        UnitVector3::raw(1.0, 0.0, 0.0)
    };
    let t1 = helper.sub(&n.scale(helper.dot(n))).normalized();
    let t2 = n.cross(&t1);
    (t1, t2)
}

fn along_geodesic(n: &UnitVector3, dir: &UnitVector3, angle: f64) -> UnitVector3 {
    let (s, c) = angle.sin_cos();
    n.scale(c).add(&dir.scale(s)).normalized()
}
