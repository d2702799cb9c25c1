//! Lattice wave functions and their local correlation operators.
//!
//! Fields live on an `nt × nx` space-time lattice, periodic in `x`, stored
//! row-major by time slice. A family of orthonormal complex fields yields at
//! every lattice point the rank-one operator `F^j_k = conj(ψ_j) ψ_k`.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{local_correlation, CorrelationPoint, WavePointData};
use crate::sum::Neumaier;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub nt: usize,
    pub nx: usize,
    pub dt: f64,
    pub dx: f64,
}

impl LatticeSpec {
    pub fn new(nt: usize, nx: usize, dt: f64, dx: f64) -> Result<Self> {
        let spec = Self { nt, nx, dt, dx };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nt < 2 || self.nx < 2 {
            return Err(Error::InvalidConfig("lattice needs nt, nx >= 2".into()));
        }
        if !(self.dt > 0.0 && self.dx > 0.0 && self.dt.is_finite() && self.dx.is_finite()) {
            return Err(Error::InvalidConfig(
                "lattice spacings must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn points(&self) -> usize {
        self.nt * self.nx
    }

    /// Courant number `Δt/Δx`.
    pub fn courant(&self) -> f64 {
        self.dt / self.dx
    }
}

/// Forward solve of the discrete d'Alembertian for the next time slice:
/// `φ(t+Δt) = 2φ(t) − φ(t−Δt) + (Δt/Δx)² (φ(x+Δx) − 2φ + φ(x−Δx))`.
pub fn wave_step(
    spec: &LatticeSpec,
    current: &[Complex64],
    previous: &[Complex64],
) -> Result<Vec<Complex64>> {
    for got in [current.len(), previous.len()] {
        if got != spec.nx {
            return Err(Error::DimensionMismatch {
                expected: spec.nx,
                got,
            });
        }
    }
    let r2 = spec.courant() * spec.courant();
    let n = spec.nx;
    Ok((0..n)
        .map(|x| {
            let left = current[(x + n - 1) % n];
            let right = current[(x + 1) % n];
            let here = current[x];
            here * 2.0 - previous[x] + (right - here * 2.0 + left) * r2
        })
        .collect())
}

/// Fills all `nt` slices from the first two.
pub fn evolve(
    spec: &LatticeSpec,
    first: &[Complex64],
    second: &[Complex64],
) -> Result<Vec<Complex64>> {
    let mut field = Vec::with_capacity(spec.points());
    field.extend_from_slice(first);
    field.extend_from_slice(second);
    if first.len() != spec.nx || second.len() != spec.nx {
        return Err(Error::DimensionMismatch {
            expected: spec.nx,
            got: first.len().min(second.len()),
        });
    }
    for t in 2..spec.nt {
        let next = {
            let prev = &field[(t - 2) * spec.nx..(t - 1) * spec.nx];
            let cur = &field[(t - 1) * spec.nx..t * spec.nx];
            wave_step(spec, cur, prev)?
        };
        field.extend(next);
    }
    Ok(field)
}

/// Residual of the discrete wave equation at an interior time `t`.
pub fn stencil_residual(spec: &LatticeSpec, field: &[Complex64], t: usize, x: usize) -> Complex64 {
    let n = spec.nx;
    let at = |t: usize, x: usize| field[t * n + (x % n)];
    let time = (at(t + 1, x) - at(t, x) * 2.0 + at(t - 1, x)) / (spec.dt * spec.dt);
    let space = (at(t, x + 1) - at(t, x) * 2.0 + at(t, x + n - 1)) / (spec.dx * spec.dx);
    time - space
}

/// `Σ_{t,x} conj(ψ) φ`.
pub fn lattice_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = Neumaier::new();
    let mut im = Neumaier::new();
    for (x, y) in a.iter().zip(b) {
        let p = x.conj() * y;
        re.add(p.re);
        im.add(p.im);
    }
    Complex64::new(re.value(), im.value())
}

/// An orthonormal family of lattice fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFamily {
    pub spec: LatticeSpec,
    pub waves: Vec<Vec<Complex64>>,
}

impl WaveFamily {
    pub fn len(&self) -> usize {
        self.waves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waves.is_empty()
    }

    /// Gram matrix `⟨ψ_k | ψ_l⟩`, row-major.
    pub fn gram(&self) -> Vec<Complex64> {
        let f = self.waves.len();
        let mut out = Vec::with_capacity(f * f);
        for a in &self.waves {
            for b in &self.waves {
                out.push(lattice_inner(a, b));
            }
        }
        out
    }
}

/// Relative norm below which a Gram–Schmidt remainder counts as dependent.
const DEPENDENCE_TOL: f64 = 1e-10;

/// Modified Gram–Schmidt with one reorthogonalization pass.
pub fn orthonormalize(spec: &LatticeSpec, raw: Vec<Vec<Complex64>>) -> Result<WaveFamily> {
    spec.validate()?;
    if raw.len() > spec.points() {
        return Err(Error::LinearlyDependent {
            index: spec.points(),
        });
    }
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(raw.len());
    for (index, mut w) in raw.into_iter().enumerate() {
        if w.len() != spec.points() {
            return Err(Error::DimensionMismatch {
                expected: spec.points(),
                got: w.len(),
            });
        }
        let original = lattice_inner(&w, &w).re.sqrt();
        for _ in 0..2 {
            for q in &basis {
                let proj = lattice_inner(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= proj * qi;
                }
            }
        }
        let norm = lattice_inner(&w, &w).re.sqrt();
        if original == 0.0 || norm <= DEPENDENCE_TOL * original {
            return Err(Error::LinearlyDependent { index });
        }
        for wi in &mut w {
            *wi /= norm;
        }
        basis.push(w);
    }
    Ok(WaveFamily {
        spec: *spec,
        waves: basis,
    })
}

/// Independent uniform samples in the unit square of `C`.
pub fn random_waves<R: Rng + ?Sized>(
    spec: &LatticeSpec,
    count: usize,
    rng: &mut R,
) -> Vec<Vec<Complex64>> {
    (0..count)
        .map(|_| {
            (0..spec.points())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect()
}

/// Solutions of the lattice wave equation from random initial slices.
pub fn wave_equation_sources<R: Rng + ?Sized>(
    spec: &LatticeSpec,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<Complex64>>> {
    (0..count)
        .map(|_| {
            let mut slice = || -> Vec<Complex64> {
                (0..spec.nx)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            };
            let (a, b) = (slice(), slice());
            evolve(spec, &a, &b)
        })
        .collect()
}

/// The local correlation operator at every lattice point, row-major.
pub fn correlation_map(fam: &WaveFamily) -> Result<Vec<CorrelationPoint>> {
    (0..fam.spec.points())
        .into_par_iter()
        .map(|p| {
            let values: Vec<Complex64> = fam.waves.iter().map(|w| w[p]).collect();
            local_correlation(&WavePointData::scalar(&values))
        })
        .collect()
}

/// `Tr(A B)` of two Hermitian operators; real up to rounding.
pub fn trace_product(a: &CorrelationPoint, b: &CorrelationPoint) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let (ma, mb) = (a.op().matrix(), b.op().matrix());
    let mut acc = Neumaier::new();
    for r in 0..a.dim() {
        for c in 0..a.dim() {
            acc.add((ma[(r, c)] * mb[(c, r)]).re);
        }
    }
    Ok(acc.value())
}

/// `Σ_{i,j} c_i c_j Tr(F_i F_j)²`; unit weights when none are given.
pub fn simple_action(points: &[CorrelationPoint], weights: Option<&[f64]>) -> Result<f64> {
    if let Some(w) = weights {
        if w.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: w.len(),
            });
        }
    }
    let weight = |i: usize| weights.map_or(1.0, |w| w[i]);
    let rows: Vec<f64> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = Neumaier::new();
            for j in 0..points.len() {
                let t = trace_product(&points[i], &points[j])?;
                acc.add(weight(j) * t * t);
            }
            Ok(weight(i) * acc.value())
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().collect::<Neumaier>().value())
}

/// `A_ij = Tr(F_i F_j)²`, row-major.
fn squared_trace_matrix(points: &[CorrelationPoint]) -> Result<Vec<f64>> {
    let n = points.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| trace_product(&points[i], &points[j]).map(|t| t * t))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn quadratic_form(a: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut acc = Neumaier::new();
    for i in 0..n {
        for j in 0..n {
            acc.add(x[i] * a[i * n + j] * y[j]);
        }
    }
    acc.value()
}

/// Projected-gradient sweeps over the point weights of [`simple_action`] at
/// fixed total weight `Σ c_i = points.len()`, starting from `c_i = 1`.
/// Returns the final weights and the action before and after every sweep.
/// An illustration only: the toy action carries no further constraints.
pub fn simple_action_descent(
    points: &[CorrelationPoint],
    steps: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = points.len();
    if n == 0 {
        return Ok((Vec::new(), vec![0.0; steps + 1]));
    }
    let a = squared_trace_matrix(points)?;
    let volume = n as f64;
    let row_bound = (0..n)
        .map(|i| a[i * n..(i + 1) * n].iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let eta = if row_bound > 0.0 {
        0.5 / row_bound
    } else {
        1.0
    };

    let mut w = vec![1.0 / volume; n];
    let mut actions = vec![volume * volume * quadratic_form(&a, &w, &w)];
    for _ in 0..steps {
        let grad: Vec<f64> = (0..n)
            .map(|i| {
                2.0 * a[i * n..(i + 1) * n]
                    .iter()
                    .zip(&w)
                    .map(|(x, y)| x * y)
                    .collect::<Neumaier>()
                    .value()
            })
            .collect();
        let target: Vec<f64> = w.iter().zip(&grad).map(|(x, g)| x - eta * g).collect();
        let projected = crate::solver::project_simplex(&target);
        let dir: Vec<f64> = projected.iter().zip(&w).map(|(p, x)| p - x).collect();
        let linear = quadratic_form(&a, &dir, &w);
        let quad = quadratic_form(&a, &dir, &dir);
        if linear < 0.0 {
            let t = if quad > 0.0 {
                (-linear / quad).min(1.0)
            } else {
                1.0
            };
            w = w
                .iter()
                .zip(&dir)
                .map(|(x, d)| (x + t * d).max(0.0))
                .collect();
        }
        actions.push(volume * volume * quadratic_form(&a, &w, &w));
    }
    Ok((w.into_iter().map(|x| x * volume).collect(), actions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{membership_check, HermitianOperator};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_field_is_stationary() {
        let spec = LatticeSpec::new(4, 8, 0.3, 0.5).unwrap();
        let k = vec![c(2.5, -1.0); 8];
        assert_eq!(wave_step(&spec, &k, &k).unwrap(), k);
    }

    #[test]
    fn unit_courant_propagates_plane_waves_exactly() {
        let (nt, nx) = (12, 16);
        let spec = LatticeSpec::new(nt, nx, 0.1, 0.1).unwrap();
        let k = 2.0 * PI * 3.0 / nx as f64;
        let plane = |t: usize, x: usize| Complex64::from_polar(1.0, k * (x as f64 - t as f64));
        let first: Vec<_> = (0..nx).map(|x| plane(0, x)).collect();
        let second: Vec<_> = (0..nx).map(|x| plane(1, x)).collect();
        let field = evolve(&spec, &first, &second).unwrap();
        for t in 0..nt {
            for x in 0..nx {
                assert!((field[t * nx + x] - plane(t, x)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn linear_field_wraps_periodically() {
        let spec = LatticeSpec::new(3, 5, 1.0, 2.0).unwrap();
        let cur: Vec<_> = (0..5).map(|x| c(x as f64, 0.0)).collect();
        let prev = vec![c(0.0, 0.0); 5];
        let next = wave_step(&spec, &cur, &prev).unwrap();
        // Interior points have zero curvature; the wrap sees 4 → 0 → 1 and 3 → 4 → 0.
        let expected = [
            0.0 + 0.25 * (1.0 + 4.0),
            2.0,
            4.0,
            6.0,
            8.0 + 0.25 * (0.0 - 8.0 + 3.0),
        ];
        for (got, want) in next.iter().zip(expected) {
            assert_eq!(got.re, want);
        }
        assert!(wave_step(&spec, &cur[..4], &prev).is_err());
    }

    #[test]
    fn standing_wave_satisfies_the_stencil() {
        let (nt, nx) = (10, 24);
        let spec = LatticeSpec::new(nt, nx, 0.05, 0.1).unwrap();
        let k = 2.0 * PI * 2.0 / (nx as f64 * spec.dx);
        let omega = 2.0 / spec.dt * (spec.dt / spec.dx * (k * spec.dx / 2.0).sin()).asin();
        let field: Vec<Complex64> = (0..nt)
            .flat_map(|t| (0..nx).map(move |x| (t, x)))
            .map(|(t, x)| {
                c(
                    (k * x as f64 * spec.dx).sin() * (omega * t as f64 * spec.dt).cos(),
                    0.0,
                )
            })
            .collect();
        for t in 1..nt - 1 {
            for x in 0..nx {
                assert!(stencil_residual(&spec, &field, t, x).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn orthonormalize_examples() {
        let spec = LatticeSpec::new(2, 2, 1.0, 1.0).unwrap();
        let basis: Vec<Vec<Complex64>> = (0..3)
            .map(|k| {
                (0..4)
                    .map(|p| c(if p == k { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        let fam = orthonormalize(&spec, basis.clone()).unwrap();
        for (a, b) in fam.waves.iter().zip(&basis) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).norm() <= 1e-12);
            }
        }
        let twin = vec![basis[0].clone(), basis[0].clone()];
        assert_eq!(
            orthonormalize(&spec, twin),
            Err(Error::LinearlyDependent { index: 1 })
        );
    }

    #[test]
    fn correlation_map_examples() {
        let spec = LatticeSpec::new(2, 2, 1.0, 1.0).unwrap();
        let fam = WaveFamily {
            spec,
            waves: vec![
                vec![c(1.0, 0.0), c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.0)],
            ],
        };
        let ops = correlation_map(&fam).unwrap();
        let m = ops[0].op().matrix();
        assert_eq!(m[(0, 1)], c(0.0, 1.0));
        assert_eq!(m[(1, 0)], c(0.0, -1.0));
        assert!(ops[1].op().matrix().iter().all(|z| z.norm() == 0.0));
        for (p, op) in ops.iter().enumerate() {
            let direct: f64 = fam.waves.iter().map(|w| w[p].norm_sqr()).sum();
            assert_abs_diff_eq!(op.trace(), direct, epsilon = 1e-15);
            let r = membership_check(op.op(), 1);
            assert!(r.rank <= 1 && r.negatives == 0);
        }
    }

    #[test]
    fn simple_action_examples() {
        let f = local_correlation(&WavePointData::scalar(&[c(1.0, 0.0), c(0.0, 1.0)])).unwrap();
        assert_relative_eq!(trace_product(&f, &f).unwrap(), 4.0, max_relative = 1e-15);
        assert_relative_eq!(
            simple_action(std::slice::from_ref(&f), None).unwrap(),
            16.0,
            max_relative = 1e-15
        );

        let a =
            CorrelationPoint::new(HermitianOperator::from_real_diagonal(&[2.0, 0.0]), 1).unwrap();
        let b =
            CorrelationPoint::new(HermitianOperator::from_real_diagonal(&[0.0, 3.0]), 1).unwrap();
        assert_eq!(trace_product(&a, &b).unwrap(), 0.0);
        assert_eq!(
            simple_action(&[a.clone(), b.clone()], None).unwrap(),
            16.0 + 81.0
        );
        assert_eq!(
            simple_action(&[a, b], Some(&[0.5, 0.5])).unwrap(),
            0.25 * (16.0 + 81.0)
        );
        assert_eq!(simple_action(&[], None).unwrap(), 0.0);
    }

    #[test]
    fn weight_descent_never_increases_the_action() {
        let spec = LatticeSpec::new(3, 4, 0.2, 0.2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let fam = orthonormalize(&spec, random_waves(&spec, 2, &mut rng)).unwrap();
        let ops = correlation_map(&fam).unwrap();
        let (weights, actions) = simple_action_descent(&ops, 20).unwrap();
        assert_relative_eq!(
            actions[0],
            simple_action(&ops, None).unwrap(),
            max_relative = 1e-12
        );
        assert!(actions.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-12)));
        assert_relative_eq!(weights.iter().sum::<f64>(), 12.0, max_relative = 1e-12);
        assert_relative_eq!(
            *actions.last().unwrap(),
            simple_action(&ops, Some(&weights)).unwrap(),
            max_relative = 1e-10
        );
    }
}
