//! Surface-layer integrals: double sums with one point inside a region `Ω`
//! and the other outside.

use std::collections::BTreeSet;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::sphere::{vec3, PairKernel, SphereSystem, Vec3};
use crate::sum::Neumaier;

/// A subset `Ω` of the support, given by point indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    inside: BTreeSet<usize>,
}

impl Region {
    pub fn new<I: IntoIterator<Item = usize>>(indices: I, support_len: usize) -> Result<Self> {
        let inside: BTreeSet<usize> = indices.into_iter().collect();
        if let Some(&bad) = inside.iter().find(|&&i| i >= support_len) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: support_len,
            });
        }
        Ok(Self { inside })
    }

    pub fn empty() -> Self {
        Self {
            inside: BTreeSet::new(),
        }
    }

    pub fn full(support_len: usize) -> Self {
        Self {
            inside: (0..support_len).collect(),
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.inside.contains(&i)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.inside.iter().copied()
    }

    pub fn complement(&self, support_len: usize) -> Self {
        Self {
            inside: (0..support_len)
                .filter(|i| !self.inside.contains(i))
                .collect(),
        }
    }
}

/// The derivative insertion of a surface-layer integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKernel {
    /// `(∇_{1,𝔲}∇_{2,𝔳} − ∇_{1,𝔳}∇_{2,𝔲}) 𝓛`
    Symplectic,
    /// `(∇_{1,𝔲}∇_{1,𝔳} − ∇_{2,𝔲}∇_{2,𝔳}) 𝓛`
    Inner,
    /// `𝓛` itself; the jets are ignored.
    Raw,
}

impl FromStr for SurfaceKernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symplectic" => Ok(Self::Symplectic),
            "inner" => Ok(Self::Inner),
            "raw" => Ok(Self::Raw),
            other => Err(Error::UnknownKernel(other.to_string())),
        }
    }
}

impl std::fmt::Display for SurfaceKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Symplectic => "symplectic",
            Self::Inner => "inner",
            Self::Raw => "raw",
        })
    }
}

#[derive(Clone, Copy)]
struct Local {
    b: f64,
    v: Vec3,
}

fn local(jet: &Jet, i: usize) -> Local {
    Local {
        b: jet.b[i],
        v: jet.v[i],
    }
}

/// `∇_{1,a}∇_{2,w} 𝓛(x, y)` with `a` at `x` and `w` at `y`.
fn mixed(k: &PairKernel, a: Local, x: &Vec3, w: Local, y: &Vec3) -> f64 {
    let a_y = vec3::dot(&a.v, y);
    let w_x = vec3::dot(&w.v, x);
    (a.b * w.b) * k.value
        + (a.b * (k.d1 * w_x) + w.b * (k.d1 * a_y))
        + (k.d2 * (a_y * w_x) + k.d1 * vec3::dot(&a.v, &w.v))
}

/// `∇_{1,a}∇_{1,w} 𝓛(x, y)` with both jets at `x`. Symmetric in `(a, w)`
/// bit for bit.
fn same_slot(k: &PairKernel, a: Local, w: Local, y: &Vec3) -> f64 {
    let a_y = vec3::dot(&a.v, y);
    let w_y = vec3::dot(&w.v, y);
    (a.b * w.b) * k.value
        + (a.b * (k.d1 * w_y) + w.b * (k.d1 * a_y))
        + (k.d2 * (a_y * w_y) - k.cos * (k.d1 * vec3::dot(&a.v, &w.v)))
}

fn pair_kernel(
    kernel: SurfaceKernel,
    sys: &SphereSystem,
    u: &Jet,
    v: &Jet,
    i: usize,
    j: usize,
) -> f64 {
    let pts = sys.points();
    let k = PairKernel::new(&pts[i], &pts[j], sys.tau());
    if k.value == 0.0 && k.d1 == 0.0 {
        return 0.0;
    }
    let (xi, xj) = (pts[i].coords(), pts[j].coords());
    match kernel {
        SurfaceKernel::Raw => k.value,
        SurfaceKernel::Symplectic => {
            mixed(&k, local(u, i), xi, local(v, j), xj)
                - mixed(&k, local(v, i), xi, local(u, j), xj)
        }
        SurfaceKernel::Inner => {
            same_slot(&k, local(u, i), local(v, i), xj)
                - same_slot(&k, local(u, j), local(v, j), xi)
        }
    }
}

fn check_jets(sys: &SphereSystem, u: &Jet, v: &Jet) -> Result<()> {
    u.validate(sys)?;
    v.validate(sys)
}

/// `Σ_{i∈Ω} Σ_{j∉Ω} c_i c_j K(i, j)`.
pub fn surface_layer(
    sys: &SphereSystem,
    region: &Region,
    kernel: SurfaceKernel,
    u: &Jet,
    v: &Jet,
) -> Result<f64> {
    check_jets(sys, u, v)?;
    if let Some(bad) = region.indices().find(|&i| i >= sys.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: sys.len(),
        });
    }
    let ws = sys.weights();
    let mut acc = Neumaier::new();
    for i in region.indices() {
        for j in (0..sys.len()).filter(|j| !region.contains(*j)) {
            let w = ws[i] * ws[j];
            if w != 0.0 {
                acc.add(w * pair_kernel(kernel, sys, u, v, i, j));
            }
        }
    }
    Ok(acc.value())
}

/// String-tagged entry point; unknown tags are rejected.
pub fn generic_surface_layer(
    sys: &SphereSystem,
    region: &Region,
    kernel: &str,
    u: &Jet,
    v: &Jet,
) -> Result<f64> {
    surface_layer(sys, region, kernel.parse()?, u, v)
}

/// Symplectic form `σ_Ω(𝔲, 𝔳)`.
pub fn symplectic(sys: &SphereSystem, region: &Region, u: &Jet, v: &Jet) -> Result<f64> {
    surface_layer(sys, region, SurfaceKernel::Symplectic, u, v)
}

/// Surface-layer inner product `(𝔲, 𝔳)_Ω`. Not necessarily positive.
pub fn surface_inner(sys: &SphereSystem, region: &Region, u: &Jet, v: &Jet) -> Result<f64> {
    surface_layer(sys, region, SurfaceKernel::Inner, u, v)
}

/// Whether a boundary-crossing pair touches the `𝒟 = 0` band.
pub fn crossing_boundary_contact(sys: &SphereSystem, region: &Region) -> bool {
    let pts = sys.points();
    region.indices().any(|i| {
        (0..sys.len())
            .filter(|j| !region.contains(*j))
            .any(|j| PairKernel::new(&pts[i], &pts[j], sys.tau()).boundary_contact)
    })
}

/// One line of the surface-layer CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRow {
    pub omega_id: String,
    pub form: SurfaceKernel,
    pub value: f64,
    /// Only meaningful for the inner product.
    pub non_positive: bool,
    pub boundary_contact: bool,
}

impl SurfaceRow {
    pub const CSV_HEADER: &'static str = "omega_id,form,value,non_positive,boundary_contact";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.16e},{},{}",
            self.omega_id, self.form, self.value, self.non_positive, self.boundary_contact
        )
    }
}

/// Evaluates all three kernels on one region.
pub fn surface_rows(
    sys: &SphereSystem,
    omega_id: &str,
    region: &Region,
    u: &Jet,
    v: &Jet,
) -> Result<Vec<SurfaceRow>> {
    let contact = crossing_boundary_contact(sys, region);
    [
        SurfaceKernel::Symplectic,
        SurfaceKernel::Inner,
        SurfaceKernel::Raw,
    ]
    .into_iter()
    .map(|form| {
        let value = surface_layer(sys, region, form, u, v)?;
        Ok(SurfaceRow {
            omega_id: omega_id.to_string(),
            form,
            value,
            non_positive: form == SurfaceKernel::Inner && value <= 0.0,
            boundary_contact: contact,
        })
    })
    .collect()
}
