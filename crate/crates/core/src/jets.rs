//! Jets on weighted counting measures of the sphere, the weak
//! Euler–Lagrange residual and the linearized-field Laplacian.
//!
//! A jet `𝔳 = (b, v)` assigns to every support point a scalar `b_i` (a first
//! order change `c_i → c_i(1 + ε b_i)` of the weight) and a tangent vector
//! `v_i` (a displacement of the point). Jets act on functions by
//! `∇_𝔳 η(x_i) = b_i η(x_i) + ⟨v_i, grad η(x_i)⟩`.
//!
//! Derivatives of the Lagrangian use the closed form of the sphere kernel:
//! with `c = ⟨x, y⟩`, a tangent `u` at `x` and a tangent `w` at `y`,
//!
//! * `D_u 𝓛 = 𝒟'(c)⟨u, y⟩`,
//! * `D_u D_w 𝓛 = 𝒟''⟨u, y⟩⟨w, x⟩ + 𝒟'⟨u, w⟩` (different slots),
//! * `D_u D_{u'} 𝓛 = 𝒟''⟨u, y⟩⟨u', y⟩ − c 𝒟'⟨u, u'⟩` (same slot, Riemannian
//!   Hessian on the sphere),
//!
//! all restricted to `𝒟 > 0` and zero on the flat side.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{
    fibonacci_sphere, grad_sphere_lagrangian, potential, vec3, PairKernel, SpherePoint,
    SphereSystem, Vec3,
};
use crate::sum::Neumaier;

/// Slack on `⟨v_i, x_i⟩ = 0`.
pub const TANGENCY_TOL: f64 = 1e-10;

/// Default probe grid size of [`el_residual`].
pub const DEFAULT_PROBE_POINTS: usize = 2000;

/// Default weight below which a point does not count as support.
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub b: Vec<f64>,
    pub v: Vec<Vec3>,
}

impl Jet {
    pub fn zero(len: usize) -> Self {
        Self {
            b: vec![0.0; len],
            v: vec![[0.0; 3]; len],
        }
    }

    /// Scalar jet with `b = 1` at `index`.
    pub fn indicator(len: usize, index: usize) -> Self {
        let mut jet = Self::zero(len);
        jet.b[index] = 1.0;
        jet
    }

    pub fn scalar(b: Vec<f64>) -> Self {
        let len = b.len();
        Self {
            b,
            v: vec![[0.0; 3]; len],
        }
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    /// Checks sizes and tangency against the support of `sys`.
    pub fn validate(&self, sys: &SphereSystem) -> Result<()> {
        for got in [self.b.len(), self.v.len()] {
            if got != sys.len() {
                return Err(Error::DimensionMismatch {
                    expected: sys.len(),
                    got,
                });
            }
        }
        for (v, x) in self.v.iter().zip(sys.points()) {
            let normal = vec3::dot(v, x.coords());
            if normal.abs() > TANGENCY_TOL {
                return Err(Error::OutOfRange {
                    value: normal,
                    min: -TANGENCY_TOL,
                    max: TANGENCY_TOL,
                });
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Jet {
        Jet {
            b: self.b.iter().zip(&other.b).map(|(a, b)| a + b).collect(),
            v: self
                .v
                .iter()
                .zip(&other.v)
                .map(|(a, b)| vec3::add(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            b: self.b.iter().map(|a| a * s).collect(),
            v: self.v.iter().map(|a| vec3::scale(a, s)).collect(),
        }
    }
}

/// A scalar function on the sphere with a tangential gradient.
pub trait ScalarField {
    fn value(&self, x: &SpherePoint) -> f64;
    fn gradient(&self, x: &SpherePoint) -> Vec3;
}

/// `η(x) = ⟨a, x⟩`.
#[derive(Debug, Clone, Copy)]
pub struct LinearField(pub Vec3);

impl ScalarField for LinearField {
    fn value(&self, x: &SpherePoint) -> f64 {
        vec3::dot(&self.0, x.coords())
    }
    fn gradient(&self, x: &SpherePoint) -> Vec3 {
        vec3::project_tangent(x.coords(), &self.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantField(pub f64);

impl ScalarField for ConstantField {
    fn value(&self, _: &SpherePoint) -> f64 {
        self.0
    }
    fn gradient(&self, _: &SpherePoint) -> Vec3 {
        [0.0; 3]
    }
}

/// The potential `ℓ(x) = Σ_j c_j 𝓛(x, x_j)` of a system.
pub struct Potential<'a>(pub &'a SphereSystem);

impl ScalarField for Potential<'_> {
    fn value(&self, x: &SpherePoint) -> f64 {
        ell(self.0, x)
    }
    fn gradient(&self, x: &SpherePoint) -> Vec3 {
        ell_gradient(self.0, x)
    }
}

/// `∇_𝔳 η(x_i) = b_i η(x_i) + ⟨v_i, grad η(x_i)⟩`.
pub fn nabla<F: ScalarField + ?Sized>(
    jet: &Jet,
    field: &F,
    points: &[SpherePoint],
    i: usize,
) -> Result<f64> {
    if i >= jet.len() || i >= points.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: jet.len().min(points.len()),
        });
    }
    let x = &points[i];
    Ok(jet.b[i] * field.value(x) + vec3::dot(&jet.v[i], &field.gradient(x)))
}

/// `ℓ(x) = Σ_j c_j 𝓛(x, x_j)`.
pub fn ell(sys: &SphereSystem, x: &SpherePoint) -> f64 {
    potential(sys.points(), sys.weights(), sys.tau(), x)
}

/// Tangential gradient of `ℓ` at `x`.
pub fn ell_gradient(sys: &SphereSystem, x: &SpherePoint) -> Vec3 {
    let mut g = [0.0; 3];
    for (y, w) in sys.points().iter().zip(sys.weights()) {
        g = vec3::axpy(&g, *w, &grad_sphere_lagrangian(x, y, sys.tau()));
    }
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ELReport {
    pub ell_values: Vec<f64>,
    /// Twice the weighted mean of `ℓ` over the support.
    pub nu: f64,
    /// `max − min` of `ℓ` over points with weight above the support threshold.
    pub el_spread: f64,
    /// `min ℓ` over the probe grid minus the support mean; `None` without probes.
    pub off_support_min: Option<f64>,
    /// Largest `|grad ℓ|` over support points clear of the `𝒟 = 0` kink.
    pub max_tangential_gradient: f64,
    /// Support points with a partner on the kink, where `grad ℓ` is one-sided.
    pub boundary_contacts: usize,
}

impl ELReport {
    pub const CSV_HEADER: &'static str = "index,ell";
}

pub fn el_residual(sys: &SphereSystem) -> ELReport {
    el_residual_with(sys, DEFAULT_SUPPORT_THRESHOLD, DEFAULT_PROBE_POINTS)
}

pub fn el_residual_with(
    sys: &SphereSystem,
    support_threshold: f64,
    probe_points: usize,
) -> ELReport {
    let ell_values: Vec<f64> = sys.points().iter().map(|x| ell(sys, x)).collect();
    let support: Vec<usize> = (0..sys.len())
        .filter(|&i| sys.weights()[i] > support_threshold)
        .collect();

    let mut num = Neumaier::new();
    let mut den = Neumaier::new();
    for &i in &support {
        num.add(sys.weights()[i] * ell_values[i]);
        den.add(sys.weights()[i]);
    }
    let mean = if den.value() > 0.0 {
        num.value() / den.value()
    } else {
        0.0
    };

    let (min, max) = support
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            (lo.min(ell_values[i]), hi.max(ell_values[i]))
        });
    let el_spread = if support.is_empty() { 0.0 } else { max - min };

    let (smooth, kinked): (Vec<usize>, Vec<usize>) =
        support.iter().partition(|&&i| !boundary_contact(sys, i));
    let max_tangential_gradient = smooth
        .iter()
        .map(|&i| vec3::norm(&ell_gradient(sys, &sys.points()[i])))
        .fold(0.0, f64::max);

    let off_support_min = (probe_points > 0).then(|| {
        fibonacci_sphere(probe_points)
            .iter()
            .map(|z| ell(sys, z))
            .fold(f64::INFINITY, f64::min)
            - mean
    });

    ELReport {
        ell_values,
        nu: 2.0 * mean,
        el_spread,
        off_support_min,
        max_tangential_gradient,
        boundary_contacts: kinked.len(),
    }
}

/// Jet data living at a single support point.
#[derive(Debug, Clone, Copy)]
struct LocalJet {
    b: f64,
    v: Vec3,
}

impl LocalJet {
    fn of(jet: &Jet, i: usize) -> Self {
        Self {
            b: jet.b[i],
            v: jet.v[i],
        }
    }

    fn is_zero(&self) -> bool {
        self.b == 0.0 && self.v == [0.0; 3]
    }
}

/// `⟨𝔲, Δ𝔳⟩(x_i)` for `𝔲` and `𝔳` supported at `i` and `p` respectively.
fn pairing_local(sys: &SphereSystem, nu: f64, i: usize, u: LocalJet, p: usize, v: LocalJet) -> f64 {
    let tau = sys.tau();
    let pts = sys.points();
    let ws = sys.weights();
    let xi = pts[i].coords();

    if p != i {
        let xp = pts[p].coords();
        let k = PairKernel::new(&pts[i], &pts[p], tau);
        let v_xi = vec3::dot(&v.v, xi);
        let u_xp = vec3::dot(&u.v, xp);
        let inner = v.b * k.value + k.d1 * v_xi;
        let derivative = v.b * k.d1 * u_xp + k.d2 * u_xp * v_xi + k.d1 * vec3::dot(&v.v, &u.v);
        return ws[p] * (u.b * inner + derivative);
    }

    let mut inner = Neumaier::new();
    let mut derivative = Neumaier::new();
    let uv = vec3::dot(&u.v, &v.v);
    for (k_idx, (xk, ck)) in pts.iter().zip(ws).enumerate() {
        if *ck == 0.0 {
            continue;
        }
        let k = PairKernel::new(&pts[i], xk, tau);
        let u_xk = vec3::dot(&u.v, xk.coords());
        let v_xk = vec3::dot(&v.v, xk.coords());
        // b_v(x) 𝓛 + D_{v(x)} 𝓛 for every partner point.
        inner.add(ck * (v.b * k.value + k.d1 * v_xk));
        derivative.add(ck * (v.b * k.d1 * u_xk + k.d2 * u_xk * v_xk - k.cos * k.d1 * uv));
        if k_idx == i {
            // The partner itself carries the jet: b_v(y) 𝓛 + D_{v(y)} 𝓛.
            let v_xi = vec3::dot(&v.v, xi);
            let u_xi = vec3::dot(&u.v, xi);
            inner.add(ck * (v.b * k.value + k.d1 * v_xi));
            derivative.add(ck * (v.b * k.d1 * u_xi + k.d2 * u_xi * v_xi + k.d1 * uv));
        }
    }
    inner.add(-v.b * nu / 2.0);
    u.b * inner.value() + derivative.value()
}

/// `⟨𝔲, Δ𝔳⟩(x_i) = ∇_𝔲( Σ_j c_j (∇_{1,𝔳} + ∇_{2,𝔳}) 𝓛(x, x_j) − ∇_𝔳 ν/2 )` at
/// `x = x_i`, with the coefficients of `𝔳` held fixed under the outer
/// derivative.
pub fn laplacian_pairing(sys: &SphereSystem, u: &Jet, v: &Jet, nu: f64, i: usize) -> Result<f64> {
    u.validate(sys)?;
    v.validate(sys)?;
    if i >= sys.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: sys.len(),
        });
    }
    let ui = LocalJet::of(u, i);
    let mut acc = Neumaier::new();
    for p in 0..sys.len() {
        let vp = LocalJet::of(v, p);
        if !vp.is_zero() {
            acc.add(pairing_local(sys, nu, i, ui, p, vp));
        }
    }
    Ok(acc.value())
}

/// Whether any pair `(i, j)` with `c_j > 0` sits within the boundary band
/// of `𝒟 = 0`, where the Lagrangian is not differentiable.
pub fn boundary_contact(sys: &SphereSystem, i: usize) -> bool {
    let pts = sys.points();
    (0..sys.len()).any(|j| {
        sys.weights()[j] > 0.0 && PairKernel::new(&pts[i], &pts[j], sys.tau()).boundary_contact
    })
}

/// Coordinate basis at point `i`: index `3i` is the scalar jet, `3i + 1` and
/// `3i + 2` the tangent frame vectors.
pub fn basis_jet(sys: &SphereSystem, coordinate: usize) -> Jet {
    let (i, k) = (coordinate / 3, coordinate % 3);
    let mut jet = Jet::zero(sys.len());
    if k == 0 {
        jet.b[i] = 1.0;
    } else {
        jet.v[i] = sys.points()[i].tangent_frame()[k - 1];
    }
    jet
}

fn local_basis(sys: &SphereSystem, coordinate: usize) -> LocalJet {
    let (i, k) = (coordinate / 3, coordinate % 3);
    if k == 0 {
        LocalJet {
            b: 1.0,
            v: [0.0; 3],
        }
    } else {
        LocalJet {
            b: 0.0,
            v: sys.points()[i].tangent_frame()[k - 1],
        }
    }
}

/// Dense matrix of the Laplacian in the coordinate jet basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplacianMatrix {
    pub dim: usize,
    /// Row-major.
    pub entries: Vec<f64>,
    pub boundary_contact: bool,
}

impl LaplacianMatrix {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    /// Frobenius norm of the 3×3 block coupling points `i` and `j`.
    pub fn block_norm(&self, i: usize, j: usize) -> f64 {
        let mut acc = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let e = self.get(3 * i + a, 3 * j + b);
                acc += e * e;
            }
        }
        acc.sqrt()
    }

    /// Raw little-endian dump: `u64` dimension followed by the entries.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 8 * self.entries.len());
        out.extend_from_slice(&(self.dim as u64).to_le_bytes());
        for e in &self.entries {
            out.extend_from_slice(&e.to_le_bytes());
        }
        out
    }
}

/// Entry `(a, b) = ⟨e_a, Δ e_b⟩` evaluated at the point owning `a`.
pub fn assemble_laplacian(sys: &SphereSystem, nu: f64) -> LaplacianMatrix {
    use rayon::prelude::*;
    let dim = 3 * sys.len();
    let rows: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|a| {
            let i = a / 3;
            let u = local_basis(sys, a);
            (0..dim)
                .map(|b| pairing_local(sys, nu, i, u, b / 3, local_basis(sys, b)))
                .collect()
        })
        .collect();
    LaplacianMatrix {
        dim,
        entries: rows.into_iter().flatten().collect(),
        boundary_contact: (0..sys.len()).any(|i| boundary_contact(sys, i)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalityRow {
    pub i: usize,
    pub j: usize,
    pub angle: f64,
    pub coupling_norm: f64,
}

impl LocalityRow {
    pub const CSV_HEADER: &'static str = "i,j,angle,coupling_norm";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.16e},{:.16e}",
            self.i, self.j, self.angle, self.coupling_norm
        )
    }
}

/// Block norms of the Laplacian for every ordered pair, sorted by angle.
pub fn locality_report(sys: &SphereSystem, nu: f64) -> Vec<LocalityRow> {
    let matrix = assemble_laplacian(sys, nu);
    locality_rows(sys, &matrix)
}

pub fn locality_rows(sys: &SphereSystem, matrix: &LaplacianMatrix) -> Vec<LocalityRow> {
    let pts = sys.points();
    let mut rows: Vec<LocalityRow> = (0..sys.len())
        .flat_map(|i| (0..sys.len()).map(move |j| (i, j)))
        .map(|(i, j)| LocalityRow {
            i,
            j,
            angle: if i == j { 0.0 } else { pts[i].angle(&pts[j]) },
            coupling_norm: matrix.block_norm(i, j),
        })
        .collect();
    rows.sort_by(|a, b| {
        a.angle
            .total_cmp(&b.angle)
            .then(a.i.cmp(&b.i))
            .then(a.j.cmp(&b.j))
    });
    rows
}

/// Angle between support points `i` and `j`, `0` on the diagonal.
pub fn pair_angle(sys: &SphereSystem, i: usize, j: usize) -> f64 {
    if i == j {
        0.0
    } else {
        sys.points()[i].angle(&sys.points()[j]).clamp(0.0, PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::octahedron;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::SQRT_2;

    fn sp(u: Vec3) -> SpherePoint {
        SpherePoint::new(u).unwrap()
    }

    fn antipodal(tau: f64) -> SphereSystem {
        SphereSystem::uniform(tau, vec![sp([0.0, 0.0, 1.0]), sp([0.0, 0.0, -1.0])]).unwrap()
    }

    fn timelike_pair() -> SphereSystem {
        let s = (1.0f64 - 0.81).sqrt();
        SphereSystem::uniform(2.0, vec![sp([0.0, 0.0, 1.0]), sp([s, 0.0, 0.9])]).unwrap()
    }

    #[test]
    fn nabla_examples() {
        let pts = vec![sp([0.0, 0.0, 1.0])];
        let field = LinearField([0.3, -1.2, 5.0]);
        assert_eq!(nabla(&Jet::zero(1), &field, &pts, 0).unwrap(), 0.0);
        assert_eq!(
            nabla(&Jet::indicator(1, 0), &ConstantField(2.5), &pts, 0).unwrap(),
            2.5
        );
        let jet = Jet {
            b: vec![0.0],
            v: vec![[0.7, 0.4, 0.0]],
        };
        assert_relative_eq!(
            nabla(&jet, &field, &pts, 0).unwrap(),
            0.7 * 0.3 - 0.4 * 1.2,
            max_relative = 1e-15
        );
        assert!(nabla(&jet, &field, &pts, 1).is_err());
    }

    #[test]
    fn ell_examples() {
        let sys = antipodal(2.0);
        assert_relative_eq!(ell(&sys, &sys.points()[0]), 16.0, max_relative = 1e-15);
        let single = SphereSystem::uniform(2.0, vec![sp([0.0, 0.0, 1.0])]).unwrap();
        assert_eq!(ell(&single, &sp([0.0, 0.0, -1.0])), 0.0);
        assert_eq!(ell(&single, &sp([0.0, 0.0, 1.0])), 32.0);
    }

    #[test]
    fn el_residual_on_antipodal_pair() {
        let r = el_residual(&antipodal(2.0));
        assert_eq!(r.ell_values, vec![16.0, 16.0]);
        assert_eq!(r.el_spread, 0.0);
        assert_eq!(r.nu, 32.0);
        assert_eq!(r.max_tangential_gradient, 0.0);
        assert!(r.off_support_min.unwrap() < 0.0);
    }

    #[test]
    fn el_residual_on_octahedron() {
        let sys = SphereSystem::uniform(SQRT_2, octahedron()).unwrap();
        let r = el_residual(&sys);
        for l in &r.ell_values {
            assert_relative_eq!(*l, 8.0 / 3.0, max_relative = 1e-14);
        }
        assert!(r.el_spread <= 1e-12);
        assert_relative_eq!(r.nu, 16.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn el_residual_detects_generic_configurations() {
        let sys = SphereSystem::new(
            2.0,
            vec![
                sp([0.0, 0.0, 1.0]),
                SpherePoint::from_direction([0.2, 0.1, 1.0]).unwrap(),
                sp([1.0, 0.0, 0.0]),
            ],
            vec![0.5, 0.3, 0.2],
        )
        .unwrap();
        assert!(el_residual(&sys).el_spread > 0.0);
    }

    #[test]
    fn pairing_with_zero_jet_vanishes() {
        let sys = timelike_pair();
        let u = Jet {
            b: vec![1.0, -2.0],
            v: vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        };
        for i in 0..2 {
            assert_eq!(
                laplacian_pairing(&sys, &u, &Jet::zero(2), 3.0, i).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn pairing_on_antipodal_scalar_jets() {
        let sys = antipodal(2.0);
        let v =
            laplacian_pairing(&sys, &Jet::indicator(2, 0), &Jet::indicator(2, 1), 32.0, 0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn pairing_on_timelike_scalar_jets() {
        let sys = timelike_pair();
        let v =
            laplacian_pairing(&sys, &Jet::indicator(2, 0), &Jet::indicator(2, 1), 0.0, 0).unwrap();
        assert_relative_eq!(v, 12.16, max_relative = 1e-12);
    }

    #[test]
    fn pairing_rejects_bad_index_and_non_tangent_jets() {
        let sys = timelike_pair();
        let u = Jet::indicator(2, 0);
        assert!(matches!(
            laplacian_pairing(&sys, &u, &u, 0.0, 2),
            Err(Error::IndexOutOfRange { .. })
        ));
        let bent = Jet {
            b: vec![0.0, 0.0],
            v: vec![[0.0, 0.0, 1.0], [0.0; 3]],
        };
        assert!(laplacian_pairing(&sys, &bent, &u, 0.0, 0).is_err());
    }

    #[test]
    fn assembled_matrix_matches_pairings() {
        let sys = timelike_pair();
        let m = assemble_laplacian(&sys, 1.5);
        assert_eq!(m.dim, 6);
        for a in 0..6 {
            for b in 0..6 {
                let direct =
                    laplacian_pairing(&sys, &basis_jet(&sys, a), &basis_jet(&sys, b), 1.5, a / 3)
                        .unwrap();
                assert_abs_diff_eq!(m.get(a, b), direct, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn spacelike_blocks_vanish() {
        let sys = SphereSystem::uniform(2.0, octahedron()).unwrap();
        let m = assemble_laplacian(&sys, 1.0);
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert_eq!(m.block_norm(i, j), 0.0);
                }
            }
            assert!(m.block_norm(i, i) > 0.0);
        }
    }

    #[test]
    fn zero_weights_give_zero_matrix() {
        let sys = SphereSystem::new_unnormalized(
            2.0,
            vec![sp([0.0, 0.0, 1.0]), sp([1.0, 0.0, 0.0])],
            vec![0.0, 0.0],
        )
        .unwrap();
        assert!(assemble_laplacian(&sys, 0.0)
            .entries
            .iter()
            .all(|e| *e == 0.0));
    }

    #[test]
    fn locality_rows_are_sorted() {
        let sys = timelike_pair();
        let rows = locality_report(&sys, 0.0);
        assert_eq!(rows.len(), 4);
        assert!(rows.windows(2).all(|w| w[0].angle <= w[1].angle));
        let cross = rows.iter().find(|r| r.i == 0 && r.j == 1).unwrap();
        assert!(cross.coupling_norm > 0.0);
        assert_relative_eq!(cross.angle, 0.9f64.acos(), max_relative = 1e-12);
    }

    #[test]
    fn matrix_dump_layout() {
        let m = LaplacianMatrix {
            dim: 1,
            entries: vec![2.0],
            boundary_contact: false,
        };
        let bytes = m.to_le_bytes();
        assert_eq!(&bytes[..8], &1u64.to_le_bytes());
        assert_eq!(&bytes[8..], &2.0f64.to_le_bytes());
    }
}
