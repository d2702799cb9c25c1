//! The causal variational principle on the two-sphere.
//!
//! With spin dimension one and `H = C²`, points with eigenvalues `1 ± τ` are
//! parametrized by unit vectors `x ∈ S²` through `F = 1 + τ x·σ`, and the
//! Lagrangian reduces to `max(0, 𝒟(⟨x,y⟩))` with
//! `𝒟(c) = 2τ²(1 + c)(2 − τ²(1 − c))`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{CorrelationPoint, HermitianOperator};
use crate::sum::Neumaier;

pub type Vec3 = [f64; 3];

/// Small fixed-size vector helpers.
pub mod vec3 {
    use super::Vec3;

    #[inline]
    pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    #[inline]
    pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    #[inline]
    pub fn norm(a: &Vec3) -> f64 {
        dot(a, a).sqrt()
    }

    #[inline]
    pub fn scale(a: &Vec3, s: f64) -> Vec3 {
        [a[0] * s, a[1] * s, a[2] * s]
    }

    #[inline]
    pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }

    #[inline]
    pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    /// `a + s b`
    #[inline]
    pub fn axpy(a: &Vec3, s: f64, b: &Vec3) -> Vec3 {
        [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
    }

    pub fn normalize(a: &Vec3) -> Vec3 {
        scale(a, 1.0 / norm(a))
    }

    /// Tangential part of `v` at the unit vector `x`.
    #[inline]
    pub fn project_tangent(x: &Vec3, v: &Vec3) -> Vec3 {
        axpy(v, -dot(x, v), x)
    }
}

use vec3::{dot, norm};

/// Slack allowed on `|u| = 1` and on `⟨x, y⟩ ∈ [−1, 1]`.
pub const UNIT_TOL: f64 = 1e-12;

/// Relative width (in units of `8τ²`) of the band around `𝒟 = 0` where a
/// pair counts as touching the boundary of the timelike region.
pub const BOUNDARY_CONTACT_REL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec3", into = "Vec3")]
pub struct SpherePoint {
    u: Vec3,
}

impl TryFrom<Vec3> for SpherePoint {
    type Error = Error;
    fn try_from(u: Vec3) -> Result<Self> {
        SpherePoint::new(u)
    }
}

impl From<SpherePoint> for Vec3 {
    fn from(p: SpherePoint) -> Self {
        p.u
    }
}

impl SpherePoint {
    pub fn new(u: Vec3) -> Result<Self> {
        let n = norm(&u);
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Self { u })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn from_direction(v: Vec3) -> Result<Self> {
        let n = norm(&v);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Self {
            u: vec3::scale(&v, 1.0 / n),
        })
    }

    /// Uniformly distributed point.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = rng.gen_range(-1.0..=1.0);
        let phi: f64 = rng.gen_range(0.0..(2.0 * PI));
        let r = (1.0 - z * z).max(0.0).sqrt();
        Self::retract(&[r * phi.cos(), r * phi.sin(), z])
    }

    /// Projects a nonzero vector back onto the sphere.
    pub(crate) fn retract(v: &Vec3) -> Self {
        Self {
            u: vec3::normalize(v),
        }
    }

    pub fn coords(&self) -> &Vec3 {
        &self.u
    }

    /// Clamped `⟨x, y⟩`.
    pub fn cos_angle(&self, other: &SpherePoint) -> f64 {
        dot(&self.u, &other.u).clamp(-1.0, 1.0)
    }

    pub fn angle(&self, other: &SpherePoint) -> f64 {
        self.cos_angle(other).acos()
    }

    /// Moves along the tangent vector `v` and renormalizes.
    pub fn moved(&self, v: &Vec3) -> SpherePoint {
        Self::retract(&vec3::add(&self.u, v))
    }

    /// Orthonormal basis of the tangent plane, chosen deterministically.
    pub fn tangent_frame(&self) -> [Vec3; 2] {
        let x = &self.u;
        // Start from the coordinate axis least aligned with x.
        let k = (0..3)
            .min_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()))
            .unwrap_or(0);
        let mut axis = [0.0; 3];
        axis[k] = 1.0;
        let e1 = vec3::normalize(&vec3::project_tangent(x, &axis));
        let e2 = vec3::cross(x, &e1);
        [e1, e2]
    }
}

/// `1 + τ x·σ`, with eigenvalues `1 ± τ`.
pub fn embed(p: &SpherePoint, tau: f64) -> CorrelationPoint {
    let [x, y, z] = p.u;
    let c = Complex64::new;
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            c(1.0 + tau * z, 0.0),
            c(tau * x, -tau * y),
            c(tau * x, tau * y),
            c(1.0 - tau * z, 0.0),
        ],
    );
    let op = HermitianOperator::new(m).expect("Pauli combinations are Hermitian");
    CorrelationPoint::new_unchecked(op, 1)
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau.is_finite() && tau >= 1.0) {
        return Err(Error::OutOfRange {
            value: tau,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    Ok(())
}

#[inline]
fn d_unchecked(c: f64, tau: f64) -> f64 {
    let t2 = tau * tau;
    2.0 * t2 * (1.0 + c) * (2.0 - t2 * (1.0 - c))
}

/// `𝒟(c) = 2τ²(1 + c)(2 − τ²(1 − c))` at `c = cos ϑ`.
pub fn script_d(c: f64, tau: f64) -> Result<f64> {
    if !(-1.0 - UNIT_TOL..=1.0 + UNIT_TOL).contains(&c) {
        return Err(Error::OutOfRange {
            value: c,
            min: -1.0,
            max: 1.0,
        });
    }
    Ok(d_unchecked(c.clamp(-1.0, 1.0), tau))
}

/// `d𝒟/dc = 4τ²(1 + τ²c)`.
#[inline]
pub fn script_d_prime(c: f64, tau: f64) -> f64 {
    let t2 = tau * tau;
    4.0 * t2 * (1.0 + t2 * c)
}

/// `d²𝒟/dc² = 4τ⁴`.
#[inline]
pub fn script_d_second(tau: f64) -> f64 {
    let t2 = tau * tau;
    4.0 * t2 * t2
}

/// Value and `c`-derivatives of the Lagrangian for one pair. On the flat
/// side (`𝒟 ≤ 0`) everything vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairKernel {
    pub cos: f64,
    pub script_d: f64,
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub boundary_contact: bool,
}

impl PairKernel {
    pub fn new(x: &SpherePoint, y: &SpherePoint, tau: f64) -> Self {
        let cos = x.cos_angle(y);
        let d = d_unchecked(cos, tau);
        let boundary_contact = d.abs() <= BOUNDARY_CONTACT_REL * 8.0 * tau * tau;
        if d > 0.0 {
            Self {
                cos,
                script_d: d,
                value: d,
                d1: script_d_prime(cos, tau),
                d2: script_d_second(tau),
                boundary_contact,
            }
        } else {
            Self {
                cos,
                script_d: d,
                value: 0.0,
                d1: 0.0,
                d2: 0.0,
                boundary_contact,
            }
        }
    }
}

/// `max(0, 𝒟(⟨x, y⟩))`.
pub fn sphere_lagrangian(x: &SpherePoint, y: &SpherePoint, tau: f64) -> f64 {
    d_unchecked(x.cos_angle(y), tau).max(0.0)
}

/// Tangential gradient of `𝓛(·, y)` at `x`: `4τ²(1 + τ²c) Π_x(y)` where
/// `𝒟 > 0`, zero on the flat side and on the boundary.
pub fn grad_sphere_lagrangian(x: &SpherePoint, y: &SpherePoint, tau: f64) -> Vec3 {
    let c = x.cos_angle(y);
    if d_unchecked(c, tau) <= 0.0 {
        return [0.0; 3];
    }
    let proj = vec3::axpy(&y.u, -c, &x.u);
    vec3::scale(&proj, script_d_prime(c, tau))
}

/// Opening angle `arccos(1 − 2/τ²)` beyond which pairs are spacelike.
pub fn boundary_angle(tau: f64) -> f64 {
    (1.0 - 2.0 / (tau * tau)).clamp(-1.0, 1.0).acos()
}

/// A weighted counting probability measure on the sphere at fixed `τ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct SphereSystem {
    tau: f64,
    points: Vec<SpherePoint>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    tau: f64,
    points: Vec<SpherePoint>,
    weights: Vec<f64>,
}

impl TryFrom<RawSystem> for SphereSystem {
    type Error = Error;
    fn try_from(raw: RawSystem) -> Result<Self> {
        SphereSystem::new(raw.tau, raw.points, raw.weights)
    }
}

impl From<SphereSystem> for RawSystem {
    fn from(s: SphereSystem) -> Self {
        RawSystem {
            tau: s.tau,
            points: s.points,
            weights: s.weights,
        }
    }
}

/// Slack on `Σ c_i = 1`.
pub const PROBABILITY_TOL: f64 = 1e-12;

impl SphereSystem {
    pub fn new(tau: f64, points: Vec<SpherePoint>, weights: Vec<f64>) -> Result<Self> {
        check_tau(tau)?;
        validate_probability(&weights, points.len())?;
        Ok(Self {
            tau,
            points,
            weights,
        })
    }

    /// Equal weights `1/L`.
    pub fn uniform(tau: f64, points: Vec<SpherePoint>) -> Result<Self> {
        let w = 1.0 / points.len().max(1) as f64;
        let weights = vec![w; points.len()];
        Self::new(tau, points, weights)
    }

    /// Constructs without the probability check; used for weight-scaled
    /// and zero-weight measures in the jet diagnostics.
    pub fn new_unnormalized(tau: f64, points: Vec<SpherePoint>, weights: Vec<f64>) -> Result<Self> {
        check_tau(tau)?;
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidWeights(format!(
                "weight {w} is negative or not finite"
            )));
        }
        Ok(Self {
            tau,
            points,
            weights,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The system as a measure on 2×2 correlation operators.
    pub fn to_measure(&self) -> crate::kernel::DiscreteMeasure {
        let pts = self.points.iter().map(|p| embed(p, self.tau)).collect();
        crate::kernel::DiscreteMeasure::new(pts, self.weights.clone())
            .expect("sphere systems embed into a common space")
    }
}

fn validate_probability(weights: &[f64], len: usize) -> Result<()> {
    if weights.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            got: weights.len(),
        });
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidWeights(format!(
            "weight {w} is negative or not finite"
        )));
    }
    let total = crate::sum::sum(weights.iter().copied());
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::InvalidWeights(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// `Σ_j c_j 𝓛(x, x_j)`.
pub fn potential(points: &[SpherePoint], weights: &[f64], tau: f64, x: &SpherePoint) -> f64 {
    let mut acc = Neumaier::new();
    for (p, w) in points.iter().zip(weights) {
        acc.add(w * sphere_lagrangian(x, p, tau));
    }
    acc.value()
}

pub(crate) fn action_of(points: &[SpherePoint], weights: &[f64], tau: f64) -> f64 {
    let mut acc = Neumaier::new();
    for (p, w) in points.iter().zip(weights) {
        if *w != 0.0 {
            acc.add(w * potential(points, weights, tau, p));
        }
    }
    acc.value()
}

/// `Σ_{i,j} c_i c_j 𝓛(x_i, x_j)`.
pub fn sphere_action(sys: &SphereSystem) -> f64 {
    action_of(&sys.points, &sys.weights, sys.tau)
}

/// One sample of the kernel profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub angle: f64,
    pub script_d: f64,
    pub lagrangian: f64,
}

/// `samples` equally spaced angles from `0` to `π` inclusive.
pub fn profile(tau: f64, samples: usize) -> Result<Vec<ProfileRow>> {
    check_tau(tau)?;
    let rows = (0..samples)
        .map(|k| {
            let angle = if samples == 1 {
                0.0
            } else {
                PI * k as f64 / (samples - 1) as f64
            };
            let d = d_unchecked(angle.cos(), tau);
            ProfileRow {
                angle,
                script_d: d,
                lagrangian: d.max(0.0),
            }
        })
        .collect();
    Ok(rows)
}

/// Spherical Fibonacci lattice of `n` nearly uniform points.
pub fn fibonacci_sphere(n: usize) -> Vec<SpherePoint> {
    let golden = PI * (3.0 - 5.0f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            SpherePoint::retract(&[r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

/// The six vertices `±e_k`.
pub fn octahedron() -> Vec<SpherePoint> {
    let mut out = Vec::with_capacity(6);
    for k in 0..3 {
        for s in [1.0, -1.0] {
            let mut u = [0.0; 3];
            u[k] = s;
            out.push(SpherePoint { u });
        }
    }
    out
}

/// The twelve vertices of a regular icosahedron.
pub fn icosahedron() -> Vec<SpherePoint> {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut out = Vec::with_capacity(12);
    for a in [1.0, -1.0] {
        for b in [phi, -phi] {
            out.push(SpherePoint::retract(&[0.0, a, b]));
            out.push(SpherePoint::retract(&[a, b, 0.0]));
            out.push(SpherePoint::retract(&[b, 0.0, a]));
        }
    }
    out
}
