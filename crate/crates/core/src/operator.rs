//! Finite-dimensional operator algebra.
//!
//! Points of the candidate space are self-adjoint operators on a finite
//! Hilbert space with at most `n` positive and at most `n` negative
//! eigenvalues, `n` being the spin dimension. Products of two such operators
//! are in general not self-adjoint; their spectra are complex and of rank at
//! most `2n`.

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute per-entry tolerance for the Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default relative threshold below which singular values count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Numerical-rank policy shared by the spectral routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    /// Singular values (or eigenvalue moduli) below `rank_tol * scale` are zero.
    pub rank_tol: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

/// Dense self-adjoint operator on `C^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperator", into = "RawOperator")]
pub struct HermitianOperator {
    entries: DMatrix<Complex64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<RawOperator> for HermitianOperator {
    type Error = Error;

    fn try_from(raw: RawOperator) -> Result<Self> {
        if raw.entries.len() != raw.dim * raw.dim {
            return Err(Error::DimensionMismatch {
                expected: raw.dim * raw.dim,
                got: raw.entries.len(),
            });
        }
        let m = DMatrix::from_row_iterator(
            raw.dim,
            raw.dim,
            raw.entries.iter().map(|&[re, im]| Complex64::new(re, im)),
        );
        HermitianOperator::new(m)
    }
}

impl From<HermitianOperator> for RawOperator {
    fn from(op: HermitianOperator) -> Self {
        let dim = op.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let z = op.entries[(r, c)];
                entries.push([z.re, z.im]);
            }
        }
        RawOperator { dim, entries }
    }
}

impl HermitianOperator {
    /// Validates Hermiticity; the stored matrix is the input as given.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        let dim = entries.nrows();
        for r in 0..dim {
            for c in r..dim {
                let deviation = (entries[(r, c)] - entries[(c, r)].conj()).norm();
                if deviation > HERMITIAN_TOL {
                    return Err(Error::NotHermitian {
                        row: r,
                        col: c,
                        deviation,
                    });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(dim, dim, |r, c| rows[r][c]))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let m = DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(diag[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { entries: m }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.entries[(k, k)].re).sum()
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `U A U^*` for a unitary `U`.
    pub fn conjugate_by(&self, unitary: &DMatrix<Complex64>) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: unitary.nrows(),
            });
        }
        let m = unitary * &self.entries * unitary.adjoint();
        // Re-symmetrize rounding noise so the result passes the Hermitian check.
        let sym = (&m + m.adjoint()).map(|z| z * 0.5);
        Ok(Self { entries: sym })
    }
}

/// Eigenvalue census of a Hermitian operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub is_member: bool,
    pub positives: usize,
    pub negatives: usize,
    pub rank: usize,
}

/// Counts positive and negative eigenvalues; moduli below
/// `rank_tol * max|λ|` count as zero.
pub fn membership_check_with(
    op: &HermitianOperator,
    spin_dim: usize,
    cfg: &SpectralConfig,
) -> MembershipReport {
    let ev = op.eigenvalues();
    let max = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cutoff = cfg.rank_tol * max;
    let positives = ev.iter().filter(|&&v| v > cutoff && max > 0.0).count();
    let negatives = ev.iter().filter(|&&v| v < -cutoff && max > 0.0).count();
    MembershipReport {
        is_member: positives <= spin_dim && negatives <= spin_dim,
        positives,
        negatives,
        rank: positives + negatives,
    }
}

pub fn membership_check(op: &HermitianOperator, spin_dim: usize) -> MembershipReport {
    membership_check_with(op, spin_dim, &SpectralConfig::default())
}

/// A validated point of the candidate space: a Hermitian operator with at
/// most `spin_dim` positive and `spin_dim` negative eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct CorrelationPoint {
    op: HermitianOperator,
    spin_dim: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    spin_dim: usize,
    op: HermitianOperator,
}

impl TryFrom<RawPoint> for CorrelationPoint {
    type Error = Error;
    fn try_from(raw: RawPoint) -> Result<Self> {
        CorrelationPoint::new(raw.op, raw.spin_dim)
    }
}

impl From<CorrelationPoint> for RawPoint {
    fn from(p: CorrelationPoint) -> Self {
        RawPoint {
            spin_dim: p.spin_dim,
            op: p.op,
        }
    }
}

impl CorrelationPoint {
    pub fn new(op: HermitianOperator, spin_dim: usize) -> Result<Self> {
        if spin_dim == 0 {
            return Err(Error::InvalidConfig(
                "spin dimension must be positive".into(),
            ));
        }
        let report = membership_check(&op, spin_dim);
        if !report.is_member {
            return Err(Error::NotMember {
                positives: report.positives,
                negatives: report.negatives,
                spin_dim,
            });
        }
        Ok(Self { op, spin_dim })
    }

    /// Skips the eigenvalue census; callers guarantee membership.
    pub(crate) fn new_unchecked(op: HermitianOperator, spin_dim: usize) -> Self {
        Self { op, spin_dim }
    }

    pub fn zero(dim: usize, spin_dim: usize) -> Self {
        Self {
            op: HermitianOperator::zeros(dim),
            spin_dim,
        }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn spin_dim(&self) -> usize {
        self.spin_dim
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> f64 {
        self.op.trace()
    }
}

/// The `2n` eigenvalues of an operator product, zero padded and sorted by
/// descending modulus (ties: descending real part, then imaginary part).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSpectrum {
    values: Vec<Complex64>,
}

/// Moduli closer than this (relative) are treated as tied when sorting.
const SORT_TIE_TOL: f64 = 1e-12;

impl ProductSpectrum {
    /// Canonicalizes `nonzero` and pads it with zeros up to `2 * spin_dim`.
    pub fn from_values(mut values: Vec<Complex64>, spin_dim: usize) -> Self {
        values.resize(values.len().max(2 * spin_dim), Complex64::new(0.0, 0.0));
        canonical_sort(&mut values);
        Self { values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }
}

fn precedes(a: &Complex64, b: &Complex64) -> bool {
    let (ma, mb) = (a.norm(), b.norm());
    let scale = ma.max(mb);
    if (ma - mb).abs() > SORT_TIE_TOL * scale {
        return ma > mb;
    }
    if a.re != b.re {
        return a.re > b.re;
    }
    a.im > b.im
}

// Insertion sort: the tolerant comparator is not a total order, and the
// slices hold at most 2n entries.
fn canonical_sort(values: &mut [Complex64]) {
    for i in 1..values.len() {
        let mut j = i;
        while j > 0 && precedes(&values[j], &values[j - 1]) {
            values.swap(j, j - 1);
            j -= 1;
        }
    }
}

/// Both roots of `λ² − tr·λ + det`, the small root via `det / λ_big`.
fn quadratic_roots(tr: Complex64, det: Complex64) -> [Complex64; 2] {
    let disc = (tr * tr - det * 4.0).sqrt();
    let plus = tr + disc;
    let minus = tr - disc;
    let big = if plus.norm() >= minus.norm() {
        plus
    } else {
        minus
    } * 0.5;
    if big.norm() == 0.0 {
        return [big, big];
    }
    [big, det / big]
}

fn eigenvalues_small(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    match m.nrows() {
        0 => Ok(Vec::new()),
        1 => Ok(vec![m[(0, 0)]]),
        2 => {
            let tr = m[(0, 0)] + m[(1, 1)];
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            Ok(quadratic_roots(tr, det).to_vec())
        }
        _ => {
            let schur =
                Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or(Error::EigenFailure)?;
            let (_, t) = schur.unpack();
            Ok((0..t.nrows()).map(|k| t[(k, k)]).collect())
        }
    }
}

fn check_compatible(x: &CorrelationPoint, y: &CorrelationPoint) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    if x.spin_dim != y.spin_dim {
        return Err(Error::DimensionMismatch {
            expected: x.spin_dim,
            got: y.spin_dim,
        });
    }
    Ok(())
}

/// Spectrum of the product `xy`.
pub fn product_spectrum_with(
    x: &CorrelationPoint,
    y: &CorrelationPoint,
    cfg: &SpectralConfig,
) -> Result<ProductSpectrum> {
    check_compatible(x, y)?;
    let a = x.op.matrix();
    let b = y.op.matrix();
    let scale = a.norm() * b.norm();

    let raw = if x.dim() == 2 {
        let p = a * b;
        eigenvalues_small(&p)?
    } else {
        // Nonzero eigenvalues of xy = U D U^* y coincide with those of the
        // r×r compression D U^* y U onto the range of x.
        let eig = SymmetricEigen::new(a.clone());
        let max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let keep: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&k| max > 0.0 && eig.eigenvalues[k].abs() > cfg.rank_tol * max)
            .collect();
        let dim = x.dim();
        let u = DMatrix::from_fn(dim, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])]);
        let d = DMatrix::from_fn(keep.len(), keep.len(), |r, c| {
            if r == c {
                Complex64::new(eig.eigenvalues[keep[r]], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let compressed = d * u.adjoint() * b * &u;
        eigenvalues_small(&compressed)?
    };

    let cutoff = cfg.rank_tol * scale;
    let mut nonzero: Vec<Complex64> = raw.into_iter().filter(|z| z.norm() > cutoff).collect();
    let slots = 2 * x.spin_dim;
    if nonzero.len() > slots {
        // Only reachable with non-member inputs; keep the dominant part.
        canonical_sort(&mut nonzero);
        nonzero.truncate(slots);
    }
    Ok(ProductSpectrum::from_values(nonzero, x.spin_dim))
}

pub fn product_spectrum(x: &CorrelationPoint, y: &CorrelationPoint) -> Result<ProductSpectrum> {
    product_spectrum_with(x, y, &SpectralConfig::default())
}

/// Sign applied when forming local correlation operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    /// No sign for a positive-definite form, minus sign otherwise.
    #[default]
    Auto,
    /// `F^j_k = ≺ψ_j|ψ_k≻`.
    Plus,
    /// `F^j_k = −≺ψ_j|ψ_k≻`.
    Minus,
}

/// Wave values of `f` states at one point, each in `C^N`, together with the
/// Hermitian form on `C^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePointData {
    pub values: Vec<Vec<Complex64>>,
    pub form: DMatrix<Complex64>,
}

impl WavePointData {
    /// Scalar waves (`N = 1`) with the positive form `+1`.
    pub fn scalar(values: &[Complex64]) -> Self {
        Self {
            values: values.iter().map(|&z| vec![z]).collect(),
            form: DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)),
        }
    }

    /// Signature `(p, q)` of the form.
    pub fn signature(&self) -> Result<(usize, usize)> {
        let h = HermitianOperator::new(self.form.clone())?;
        let ev = h.eigenvalues();
        let max = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let cutoff = DEFAULT_RANK_TOL * max;
        if max == 0.0 || ev.iter().any(|v| v.abs() <= cutoff) {
            return Err(Error::SingularForm);
        }
        let p = ev.iter().filter(|&&v| v > 0.0).count();
        Ok((p, ev.len() - p))
    }
}

/// Local correlation operator `F^j_k = ±ψ_j^† S ψ_k` of the given wave data.
///
/// The returned point carries spin dimension `max(p, q)` of the form
/// signature, which is the smallest one guaranteeing membership.
pub fn local_correlation_with(
    data: &WavePointData,
    sign: SignConvention,
) -> Result<CorrelationPoint> {
    let n_comp = data.form.nrows();
    if data.form.ncols() != n_comp {
        return Err(Error::DimensionMismatch {
            expected: n_comp,
            got: data.form.ncols(),
        });
    }
    for v in &data.values {
        if v.len() != n_comp {
            return Err(Error::DimensionMismatch {
                expected: n_comp,
                got: v.len(),
            });
        }
    }
    let (p, q) = data.signature()?;
    let factor = match sign {
        SignConvention::Plus => 1.0,
        SignConvention::Minus => -1.0,
        SignConvention::Auto if q == 0 => 1.0,
        SignConvention::Auto => -1.0,
    };
    let f = data.values.len();
    let s = &data.form;
    let m = DMatrix::from_fn(f, f, |j, k| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..n_comp {
            for b in 0..n_comp {
                acc += data.values[j][a].conj() * s[(a, b)] * data.values[k][b];
            }
        }
        acc * factor
    });
    // Exact Hermitian symmetrization; the diagonal is real by construction.
    let m = DMatrix::from_fn(f, f, |j, k| {
        if j == k {
            Complex64::new(m[(j, j)].re, 0.0)
        } else if j < k {
            m[(j, k)]
        } else {
            m[(k, j)].conj()
        }
    });
    let op = HermitianOperator::new(m)?;
    CorrelationPoint::new(op, p.max(q).max(1))
}

pub fn local_correlation(data: &WavePointData) -> Result<CorrelationPoint> {
    local_correlation_with(data, SignConvention::Auto)
}

/// Writes a rank-one positive operator as `F = e^* e`, i.e.
/// `F^j_k = conj(e_j) e_k`. The phase is fixed by making the first
/// nonzero entry of `e` real and positive.
pub fn rank_one_factorization(point: &CorrelationPoint) -> Result<Vec<Complex64>> {
    let op = point.op();
    let report = membership_check(op, point.spin_dim().max(op.dim()));
    let dim = op.dim();
    if report.rank == 0 {
        return Ok(vec![Complex64::new(0.0, 0.0); dim]);
    }
    if report.rank > 1 {
        return Err(Error::NotRankOne { rank: report.rank });
    }
    if report.negatives > 0 {
        return Err(Error::NotPositive);
    }
    let eig = SymmetricEigen::new(op.matrix().clone());
    let (idx, lambda) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonzero rank implies a nonempty spectrum");
    let root = lambda.sqrt();
    let mut e: Vec<Complex64> = (0..dim)
        .map(|r| eig.eigenvectors[(r, idx)].conj() * root)
        .collect();
    let max = e.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if let Some(lead) = e.iter().find(|z| z.norm() > 1e-8 * max).copied() {
        let phase = lead.conj() / lead.norm();
        for z in &mut e {
            *z *= phase;
        }
    }
    Ok(e)
}
