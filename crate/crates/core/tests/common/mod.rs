#![allow(dead_code)]

use causal_core::jets::Jet;
use causal_core::operator::{CorrelationPoint, HermitianOperator};
use causal_core::sphere::{script_d, sphere_lagrangian, vec3, SpherePoint, SphereSystem, Vec3};
use causal_core::Complex64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

pub fn random_point<R: Rng>(rng: &mut R) -> SpherePoint {
    SpherePoint::random(rng)
}

pub fn random_tangent<R: Rng>(rng: &mut R, x: &SpherePoint) -> Vec3 {
    let [e1, e2] = x.tangent_frame();
    vec3::axpy(&vec3::scale(&e1, gaussian(rng)), gaussian(rng), &e2)
}

/// Haar-ish rotation from the QR factors of a Gaussian matrix.
pub fn random_rotation<R: Rng>(rng: &mut R) -> [[f64; 3]; 3] {
    let m = nalgebra::Matrix3::from_fn(|_, _| gaussian(rng));
    let qr = m.qr();
    let mut q = qr.q();
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    let mut out = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = q[(r, c)];
        }
    }
    out
}

pub fn rotate(r: &[[f64; 3]; 3], x: &SpherePoint) -> SpherePoint {
    let c = x.coords();
    let v = [0, 1, 2].map(|i| r[i][0] * c[0] + r[i][1] * c[1] + r[i][2] * c[2]);
    SpherePoint::from_direction(v).unwrap()
}

pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(gaussian(rng), gaussian(rng))
    });
    m.qr().q()
}

/// `U diag(λ) U^*` with `n` positive, `n` negative and the rest zero eigenvalues.
pub fn random_member<R: Rng>(rng: &mut R, dim: usize, n: usize) -> CorrelationPoint {
    let mut diag = vec![0.0; dim];
    for (k, d) in diag.iter_mut().enumerate().take(2 * n) {
        let mag = rng.gen_range(0.2..3.0);
        *d = if k < n { mag } else { -mag };
    }
    let u = random_unitary(rng, dim);
    let op = HermitianOperator::from_real_diagonal(&diag)
        .conjugate_by(&u)
        .unwrap();
    CorrelationPoint::new(op, n).unwrap()
}

pub fn random_weights<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

pub fn random_system<R: Rng>(rng: &mut R, tau: f64, len: usize) -> SphereSystem {
    let points = (0..len).map(|_| random_point(rng)).collect();
    SphereSystem::new(tau, points, random_weights(rng, len)).unwrap()
}

pub fn random_jet<R: Rng>(rng: &mut R, sys: &SphereSystem) -> Jet {
    Jet {
        b: (0..sys.len()).map(|_| gaussian(rng)).collect(),
        v: sys
            .points()
            .iter()
            .map(|x| random_tangent(rng, x))
            .collect(),
    }
}

/// `R(x, w) = (x + w)/|x + w|`.
pub fn retract(x: &SpherePoint, w: &Vec3) -> SpherePoint {
    SpherePoint::from_direction(vec3::add(x.coords(), w)).unwrap()
}

/// Central-difference tangential gradient of `y ↦ 𝓛(·, y)` in the first slot.
pub fn fd_gradient(x: &SpherePoint, y: &SpherePoint, tau: f64, h: f64) -> Vec3 {
    let mut g = [0.0; 3];
    for e in x.tangent_frame() {
        let plus = sphere_lagrangian(&retract(x, &vec3::scale(&e, h)), y, tau);
        let minus = sphere_lagrangian(&retract(x, &vec3::scale(&e, -h)), y, tau);
        g = vec3::axpy(&g, (plus - minus) / (2.0 * h), &e);
    }
    g
}

/// Perturbed Euler–Lagrange functional at a moving point `x`: the measure is
/// deformed along `v` to first order in `ε`, and the jet at `x` is the one
/// attached to support point `i`.
fn perturbed_el(sys: &SphereSystem, v: &Jet, nu: f64, i: usize, x: &SpherePoint, eps: f64) -> f64 {
    let tau = sys.tau();
    let moved_x = retract(x, &vec3::scale(&v.v[i], eps));
    let mut inner = 0.0;
    for (j, (xj, cj)) in sys.points().iter().zip(sys.weights()).enumerate() {
        let moved_j = retract(xj, &vec3::scale(&v.v[j], eps));
        inner += cj * (1.0 + eps * v.b[j]) * sphere_lagrangian(&moved_x, &moved_j, tau);
    }
    (1.0 + eps * v.b[i]) * (inner - nu / 2.0)
}

/// Whether no pair `(x_i, x_j)` can cross `𝒟 = 0` inside the difference
/// stencil of [`fd_laplacian_pairing`], using `|𝒟′| ≤ 4τ²(1 + τ²)`.
pub fn stencil_is_smooth(sys: &SphereSystem, u: &Jet, v: &Jet, i: usize, h: f64) -> bool {
    let tau = sys.tau();
    let lipschitz = 4.0 * tau * tau * (1.0 + tau * tau);
    let xi = &sys.points()[i];
    let reach_i = vec3::norm(&u.v[i]) + vec3::norm(&v.v[i]);
    sys.points().iter().enumerate().all(|(j, xj)| {
        let reach = 2.0 * h * (reach_i + vec3::norm(&v.v[j]));
        script_d(xi.cos_angle(xj), tau).unwrap().abs() > 2.0 * lipschitz * reach
    })
}

/// `⟨𝔲, Δ𝔳⟩(x_i)` by central differences in `ε` and along `u_i`.
pub fn fd_laplacian_pairing(
    sys: &SphereSystem,
    u: &Jet,
    v: &Jet,
    nu: f64,
    i: usize,
    h: f64,
) -> f64 {
    let xi = &sys.points()[i];
    let d_eps = |x: &SpherePoint| {
        (perturbed_el(sys, v, nu, i, x, h) - perturbed_el(sys, v, nu, i, x, -h)) / (2.0 * h)
    };
    let plus = retract(xi, &vec3::scale(&u.v[i], h));
    let minus = retract(xi, &vec3::scale(&u.v[i], -h));
    u.b[i] * d_eps(xi) + (d_eps(&plus) - d_eps(&minus)) / (2.0 * h)
}
