//! The causal Lagrangian, the causal action, its constraint functionals and
//! the causal classification of point pairs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{product_spectrum, CorrelationPoint, ProductSpectrum};
use crate::sum::{sum, Neumaier};

/// Default relative tolerance of [`classify`].
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

/// Absolute floor of the classification tolerance.
const CLASSIFY_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalRelation {
    Spacelike,
    Timelike,
    Lightlike,
}

impl std::fmt::Display for CausalRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CausalRelation::Spacelike => "spacelike",
            CausalRelation::Timelike => "timelike",
            CausalRelation::Lightlike => "lightlike",
        })
    }
}

/// `(1/4n) Σ_{i,j} (|λ_i| − |λ_j|)²` over the padded spectrum.
pub fn lagrangian_from_spectrum(spectrum: &ProductSpectrum) -> f64 {
    let moduli = spectrum.moduli();
    let spin_dim = moduli.len() / 2;
    let total = sum(moduli
        .iter()
        .flat_map(|a| moduli.iter().map(move |b| (a - b) * (a - b))));
    total / (4.0 * spin_dim as f64)
}

pub fn lagrangian(x: &CorrelationPoint, y: &CorrelationPoint) -> Result<f64> {
    Ok(lagrangian_from_spectrum(&product_spectrum(x, y)?))
}

/// Spacelike if all moduli agree, timelike if all eigenvalues are real with
/// unequal moduli, lightlike otherwise. Tolerances are relative to the
/// largest modulus.
pub fn classify(spectrum: &ProductSpectrum, rel_tol: f64) -> CausalRelation {
    let moduli = spectrum.moduli();
    let max = moduli.iter().copied().fold(0.0f64, f64::max);
    let min = moduli.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = (rel_tol * max).max(CLASSIFY_FLOOR);
    if moduli.is_empty() || max - min <= tol {
        return CausalRelation::Spacelike;
    }
    if spectrum.values().iter().all(|z| z.im.abs() <= tol) {
        CausalRelation::Timelike
    } else {
        CausalRelation::Lightlike
    }
}

pub fn classify_pair(
    x: &CorrelationPoint,
    y: &CorrelationPoint,
    rel_tol: f64,
) -> Result<CausalRelation> {
    Ok(classify(&product_spectrum(x, y)?, rel_tol))
}

/// Weighted counting measure `Σ c_i δ_{x_i}` on the space of correlation points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct DiscreteMeasure {
    points: Vec<CorrelationPoint>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    points: Vec<CorrelationPoint>,
    weights: Vec<f64>,
}

impl TryFrom<RawMeasure> for DiscreteMeasure {
    type Error = Error;
    fn try_from(raw: RawMeasure) -> Result<Self> {
        DiscreteMeasure::new(raw.points, raw.weights)
    }
}

impl From<DiscreteMeasure> for RawMeasure {
    fn from(m: DiscreteMeasure) -> Self {
        RawMeasure {
            points: m.points,
            weights: m.weights,
        }
    }
}

impl DiscreteMeasure {
    pub fn new(points: Vec<CorrelationPoint>, weights: Vec<f64>) -> Result<Self> {
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
        if let Some(first) = points.first() {
            for p in &points[1..] {
                if p.dim() != first.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: first.dim(),
                        got: p.dim(),
                    });
                }
                if p.spin_dim() != first.spin_dim() {
                    return Err(Error::DimensionMismatch {
                        expected: first.spin_dim(),
                        got: p.spin_dim(),
                    });
                }
            }
        }
        Ok(Self { points, weights })
    }

    /// Requires `Σ c_i = total_volume` within `1e-12`.
    pub fn with_volume(
        points: Vec<CorrelationPoint>,
        weights: Vec<f64>,
        total_volume: f64,
    ) -> Result<Self> {
        let m = Self::new(points, weights)?;
        if (m.volume() - total_volume).abs() > 1e-12 {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {}, expected {total_volume}",
                m.volume()
            )));
        }
        Ok(m)
    }

    pub fn empty() -> Self {
        Self {
            points: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn points(&self) -> &[CorrelationPoint] {
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

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.points.clone(),
            self.weights.iter().map(|w| w * factor).collect(),
        )
    }

    pub fn volume(&self) -> f64 {
        volume(&self.weights)
    }
}

/// `Σ_{i,j} c_i c_j f(i, j)` with rows evaluated in parallel and reduced in
/// index order.
fn weighted_double_sum<F>(weights: &[f64], f: F) -> Result<f64>
where
    F: Fn(usize, usize) -> Result<f64> + Sync,
{
    let rows: Vec<f64> = (0..weights.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = Neumaier::new();
            for (j, w) in weights.iter().enumerate() {
                acc.add(w * f(i, j)?);
            }
            Ok(weights[i] * acc.value())
        })
        .collect::<Result<_>>()?;
    Ok(sum(rows))
}

/// `Σ_{i,j} c_i c_j 𝓛(x_i, x_j)`, diagonal included.
pub fn action(measure: &DiscreteMeasure) -> Result<f64> {
    let pts = &measure.points;
    weighted_double_sum(&measure.weights, |i, j| lagrangian(&pts[i], &pts[j]))
}

/// `Σ_{i,j} c_i c_j Σ_k |λ_k^{x_i x_j}|²`.
pub fn boundedness(measure: &DiscreteMeasure) -> Result<f64> {
    let pts = &measure.points;
    weighted_double_sum(&measure.weights, |i, j| {
        let s = product_spectrum(&pts[i], &pts[j])?;
        Ok(sum(s.moduli().into_iter().map(|m| m * m)))
    })
}

/// `Σ_i c_i tr(x_i)`.
pub fn trace_integral(measure: &DiscreteMeasure) -> f64 {
    sum(measure
        .points
        .iter()
        .zip(&measure.weights)
        .map(|(p, w)| w * p.trace()))
}

/// `Σ_i c_i`.
pub fn volume(weights: &[f64]) -> f64 {
    sum(weights.iter().copied())
}

/// Functional values of a measure, one CSV row per report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub tau: Option<f64>,
    pub support_size: usize,
    pub action: f64,
    pub boundedness: f64,
    pub trace: f64,
    pub volume: f64,
}

impl FunctionalReport {
    pub const CSV_HEADER: &'static str = "tau,L,action,boundedness,trace,volume";

    pub fn evaluate(measure: &DiscreteMeasure, tau: Option<f64>) -> Result<Self> {
        Ok(Self {
            tau,
            support_size: measure.len(),
            action: action(measure)?,
            boundedness: boundedness(measure)?,
            trace: trace_integral(measure),
            volume: measure.volume(),
        })
    }

    pub fn csv_row(&self) -> String {
        let tau = self.tau.map(|t| format!("{t:.16e}")).unwrap_or_default();
        format!(
            "{tau},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.support_size, self.action, self.boundedness, self.trace, self.volume
        )
    }
}
