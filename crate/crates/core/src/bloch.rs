//! Bloch-sphere geometry for pure qubits.
//!
//! A pure state `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` is handled through its Bloch
//! vector `n = (sinθ cosφ, sinθ sinφ, cosθ)`. Outcome probabilities and
//! fidelities all reduce to dot products of these vectors, so no complex
//! arithmetic is needed anywhere in the crate.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum norm deviation accepted by [`Qubit::from_unit_vector`].
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// A pure qubit as a point on the Bloch sphere.
///
/// Always canonical: `theta ∈ [0, π]`, `phi ∈ [0, 2π)`, and `phi = 0` at the poles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQubit")]
pub struct Qubit {
    theta: f64,
    phi: f64,
}

#[derive(Deserialize)]
struct RawQubit {
    theta: f64,
    phi: f64,
}

impl TryFrom<RawQubit> for Qubit {
    type Error = Error;

    fn try_from(raw: RawQubit) -> Result<Self> {
        Qubit::new(raw.theta, raw.phi)
    }
}

impl Qubit {
    /// `|0⟩`, the north pole.
    pub const ZERO: Qubit = Qubit {
        theta: 0.0,
        phi: 0.0,
    };
    /// `|1⟩`, the south pole.
    pub const ONE: Qubit = Qubit {
        theta: PI,
        phi: 0.0,
    };

    /// Builds a canonical qubit. `phi` is wrapped into `[0, 2π)`; `theta` must
    /// already lie in `[0, π]`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite angles (theta={theta}, phi={phi})"
            )));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidInput(format!(
                "theta={theta} outside [0, pi]"
            )));
        }
        Ok(Self::canonical(theta, phi))
    }

    fn canonical(theta: f64, phi: f64) -> Self {
        if theta == 0.0 || theta == PI {
            return Qubit { theta, phi: 0.0 };
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Qubit { theta, phi }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn to_unit_vector(&self) -> UnitVector3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        UnitVector3 {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    /// Inverse of [`Qubit::to_unit_vector`]. Rejects vectors whose norm deviates
    /// from one by more than [`UNIT_TOLERANCE`].
    pub fn from_unit_vector(v: UnitVector3) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "vector ({}, {}, {}) has norm {norm}",
                v.x, v.y, v.z
            )));
        }
        Ok(Self::from_vector_unchecked(v))
    }

    /// Same as [`Qubit::from_unit_vector`] for vectors known to be unit-norm.
    pub(crate) fn from_vector_unchecked(v: UnitVector3) -> Self {
        let rho = v.x.hypot(v.y);
        let theta = rho.atan2(v.z);
        if rho == 0.0 {
            let theta = if v.z >= 0.0 { 0.0 } else { PI };
            return Qubit { theta, phi: 0.0 };
        }
        Self::canonical(theta.clamp(0.0, PI), v.y.atan2(v.x))
    }

    /// `n_self · n_other`, written as `cos Δθ − sinθ₁ sinθ₂ (1 − cos Δφ)` so that
    /// it is exactly 1 for identical states and exactly symmetric.
    pub fn bloch_overlap(&self, other: &Qubit) -> f64 {
        let dphi = self.phi - other.phi;
        (self.theta - other.theta).cos() - self.theta.sin() * other.theta.sin() * (1.0 - dphi.cos())
    }

    /// The orthogonal state (antipode on the sphere).
    pub fn antipode(&self) -> Self {
        Self::from_vector_unchecked(-self.to_unit_vector())
    }
}

/// `|⟨a|b⟩|² = (1 + n_a·n_b) / 2`.
pub fn fidelity(a: &Qubit, b: &Qubit) -> f64 {
    (0.5 * (1.0 + a.bloch_overlap(b))).clamp(0.0, 1.0)
}

/// Fidelity between two states given as Bloch vectors.
pub fn fidelity_vectors(a: &UnitVector3, b: &UnitVector3) -> f64 {
    (0.5 * (1.0 + a.dot(b))).clamp(0.0, 1.0)
}

/// A Bloch vector. Components are not re-validated on arithmetic; use
/// [`UnitVector3::new`] to construct from raw input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitVector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitVector3 {
    pub const NORTH: UnitVector3 = UnitVector3 {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    /// Normalizes `(x, y, z)`; errors on a zero or non-finite vector.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = UnitVector3 { x, y, z };
        let n = v.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidInput(format!(
                "cannot normalize ({x}, {y}, {z})"
            )));
        }
        Ok(v.scale(1.0 / n))
    }

    pub(crate) const fn raw(x: f64, y: f64, z: f64) -> Self {
        UnitVector3 { x, y, z }
    }

    #[inline]
    pub fn dot(&self, other: &UnitVector3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &UnitVector3) -> UnitVector3 {
        UnitVector3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub(crate) fn scale(&self, s: f64) -> UnitVector3 {
        UnitVector3 {
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }

    pub(crate) fn add(&self, o: &UnitVector3) -> UnitVector3 {
        UnitVector3 {
            x: self.x + o.x,
            y: self.y + o.y,
            z: self.z + o.z,
        }
    }

    pub(crate) fn sub(&self, o: &UnitVector3) -> UnitVector3 {
        UnitVector3 {
            x: self.x - o.x,
            y: self.y - o.y,
            z: self.z - o.z,
        }
    }

    pub(crate) fn normalized(&self) -> UnitVector3 {
        self.scale(1.0 / self.norm())
    }

    /// Great-circle angle to `other`, in radians.
    pub fn angle_to(&self, other: &UnitVector3) -> f64 {
        // atan2 form stays accurate for nearly (anti)parallel vectors.
        self.cross(other).norm().atan2(self.dot(other))
    }
}

impl std::ops::Neg for UnitVector3 {
    type Output = UnitVector3;

    fn neg(self) -> UnitVector3 {
        UnitVector3 {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// A proper rotation of 3-space, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    m: [[f64; 3]; 3],
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Rotation by `angle` about the unit `axis` (Rodrigues).
    pub fn about_axis(axis: &UnitVector3, angle: f64) -> Rotation {
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let (x, y, z) = (axis.x, axis.y, axis.z);
        Rotation {
            m: [
                [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
                [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
                [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
            ],
        }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn apply(&self, v: &UnitVector3) -> UnitVector3 {
        let m = &self.m;
        UnitVector3 {
            x: m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            y: m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            z: m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        }
    }

    /// Rotates a state; the result is re-canonicalized.
    pub fn apply_qubit(&self, q: &Qubit) -> Qubit {
        Qubit::from_vector_unchecked(self.apply(&q.to_unit_vector()).normalized())
    }

    pub fn transpose(&self) -> Rotation {
        let m = &self.m;
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = m[j][i];
            }
        }
        Rotation { m: t }
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.m[i][k] * other.m[k][j]).sum();
            }
        }
        Rotation { m: out }
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

/// Rotation taking `target` to the north pole.
///
/// Rotates about `ẑ × n` (normalized) by the angle between `n` and `ẑ`, so the
/// rotation maps `n` to `ẑ`; this is the inverse of the rotation carrying `ẑ`
/// onto `n`. At the poles: identity for `ẑ`, a π turn about `x̂` for `−ẑ`.
pub fn rotation_to_north_pole(target: &Qubit) -> Rotation {
    rotation_vector_to_north_pole(&target.to_unit_vector())
}

pub fn rotation_vector_to_north_pole(n: &UnitVector3) -> Rotation {
    let axis = UnitVector3::NORTH.cross(n);
    let s = axis.norm();
    if s < 1e-15 {
        return if n.z > 0.0 {
            Rotation::IDENTITY
        } else {
            Rotation::about_axis(&UnitVector3::raw(1.0, 0.0, 0.0), PI)
        };
    }
    let angle = s.atan2(n.z);
    // Turning about ẑ × n by +angle carries ẑ to n; the inverse sends n to ẑ.
    Rotation::about_axis(&axis.scale(1.0 / s), -angle)
}

/// A deterministic near-uniform point set on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    points: Vec<UnitVector3>,
}

impl SphereGrid {
    /// Wraps an explicit point list; every point must be unit-norm.
    pub fn from_points(points: Vec<UnitVector3>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| {
            let dev = (p.norm() - 1.0).abs();
            dev.is_nan() || dev > UNIT_TOLERANCE
        }) {
            return Err(Error::InvalidInput(format!(
                "grid point ({}, {}, {}) is not unit-norm",
                p.x, p.y, p.z
            )));
        }
        Ok(SphereGrid { points })
    }

    pub fn points(&self) -> &[UnitVector3] {
        &self.points
    }

    pub fn resolution(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Typical angular spacing between neighbouring points.
    pub fn spacing(&self) -> f64 {
        (4.0 * PI / self.points.len().max(1) as f64).sqrt()
    }
}

/// Fibonacci lattice with `resolution` points: `z_i = 1 − (2i+1)/n`,
/// azimuth advancing by the golden angle.
pub fn make_sphere_grid(resolution: usize) -> Result<SphereGrid> {
    if resolution < 2 {
        return Err(Error::InvalidInput(format!(
            "sphere grid needs at least 2 points, got {resolution}"
        )));
    }
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    let n = resolution as f64;
    let points = (0..resolution)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = (i as f64 * golden_angle).rem_euclid(TAU);
            let (s, c) = phi.sin_cos();
            UnitVector3::raw(rho * c, rho * s, z).normalized()
        })
        .collect();
    Ok(SphereGrid { points })
}
