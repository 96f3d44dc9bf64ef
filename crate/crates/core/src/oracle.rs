//! Independent reference computations used to check the main code paths.
//!
//! Nothing here goes through Bloch-vector dot products: outcome probabilities
//! use the trigonometric form in `(θ, φ)`, fidelities use state amplitudes,
//! and sphere averages use Gauss–Legendre × trapezoid product quadrature.

use std::f64::consts::{PI, TAU};

use crate::bloch::Qubit;
use crate::likelihood::MeasurementSequence;
use crate::measurement::Outcome;

/// Antisymmetric probability in angle form:
/// `(1 − cosθ cosϑ − cos(φ − φ_r) sinθ sinϑ) / 4`.
pub fn p_antisymmetric_trig(psi: &Qubit, reference: &Qubit) -> f64 {
    0.25 * (1.0
        - psi.theta().cos() * reference.theta().cos()
        - (psi.phi() - reference.phi()).cos() * psi.theta().sin() * reference.theta().sin())
}

/// `|⟨a|b⟩|²` from the amplitudes `(cos θ/2, e^{iφ} sin θ/2)`.
pub fn fidelity_amplitudes(a: &Qubit, b: &Qubit) -> f64 {
    let (ca, sa) = ((a.theta() / 2.0).cos(), (a.theta() / 2.0).sin());
    let (cb, sb) = ((b.theta() / 2.0).cos(), (b.theta() / 2.0).sin());
    let dphi = b.phi() - a.phi();
    let re = ca * cb + sa * sb * dphi.cos();
    let im = sa * sb * dphi.sin();
    re * re + im * im
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(x), p0 = P_{n-1}(x)
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Uniform sphere average of `f` with `n_cos × n_phi` nodes.
pub fn sphere_average(n_cos: usize, n_phi: usize, mut f: impl FnMut(&Qubit) -> f64) -> f64 {
    let (nodes, weights) = gauss_legendre(n_cos);
    let mut total = 0.0;
    for (z, w) in nodes.iter().zip(&weights) {
        let theta = z.clamp(-1.0, 1.0).acos();
        let mut ring = 0.0;
        for j in 0..n_phi {
            let phi = TAU * j as f64 / n_phi as f64;
            ring += f(&Qubit::new(theta, phi).expect("valid node"));
        }
        total += w * ring / n_phi as f64;
    }
    total / 2.0
}

/// Lookahead objective by direct quadrature (100 × 100 nodes) of
/// `p_a(c, ψ) F(e_a, ψ) + p_s(c, ψ) F(e_s, ψ)`.
pub fn objective_quadrature(candidate: &Qubit, estimate_a: &Qubit, estimate_s: &Qubit) -> f64 {
    sphere_average(100, 100, |psi| {
        let pa = p_antisymmetric_trig(candidate, psi);
        pa * fidelity_amplitudes(estimate_a, psi)
            + (1.0 - pa) * fidelity_amplitudes(estimate_s, psi)
    })
}

/// Log-likelihood in angle form.
pub fn log_likelihood_trig(seq: &MeasurementSequence, candidate: &Qubit) -> f64 {
    seq.records()
        .iter()
        .map(|r| {
            let pa = p_antisymmetric_trig(candidate, &r.reference);
            let p = match r.outcome {
                Outcome::Antisymmetric => pa,
                Outcome::Symmetric => 1.0 - pa,
            };
            if p > 0.0 {
                p.ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .sum()
}

/// Brute-force maximum of the log-likelihood over an equal-area
/// `n_cos × n_phi` lattice (cell centres in `cosθ` and `φ`), evaluated in
/// angle form.
pub fn dense_lattice_mle(seq: &MeasurementSequence, n_cos: usize, n_phi: usize) -> (Qubit, f64) {
    let refs: Vec<(bool, f64, f64, f64)> = seq
        .records()
        .iter()
        .map(|r| {
            let t = r.reference.theta();
            (
                r.outcome == Outcome::Antisymmetric,
                t.cos(),
                t.sin(),
                r.reference.phi(),
            )
        })
        .collect();
    let phis: Vec<f64> = (0..n_phi)
        .map(|j| TAU * (j as f64 + 0.5) / n_phi as f64)
        .collect();
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..n_cos {
        let cos_t = -1.0 + (2 * i + 1) as f64 / n_cos as f64;
        let sin_t = (1.0 - cos_t * cos_t).sqrt();
        for &phi in &phis {
            let mut total = 0.0;
            for &(anti, cr, sr, pr) in &refs {
                let pa = 0.25 * (1.0 - cos_t * cr - (phi - pr).cos() * sin_t * sr);
                let p = if anti { pa } else { 1.0 - pa };
                total += if p > 0.0 { p.ln() } else { f64::NEG_INFINITY };
            }
            if total > best.2 {
                best = (cos_t.acos(), phi, total);
            }
        }
    }
    (Qubit::new(best.0, best.1).expect("valid node"), best.2)
}

/// Mean fidelity after one measurement against a fixed reference, integrated
/// over the unknown state: `∫ (2 + c + c²)/4 dc/2` with `c = cosθ` relative
/// to the reference. Evaluates to 7/12.
pub fn single_step_mean_fidelity() -> f64 {
    let (nodes, weights) = gauss_legendre(8);
    nodes
        .iter()
        .zip(&weights)
        .map(|(c, w)| w * (2.0 + c + c * c) / 4.0)
        .sum::<f64>()
        / 2.0
}
