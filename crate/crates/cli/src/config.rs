//! Experiment configuration documents.

use std::path::{Path, PathBuf};

use causal_core::jets::{basis_jet, Jet};
use causal_core::lattice::LatticeSpec;
use causal_core::solver::MinimizerConfig;
use causal_core::sphere::{fibonacci_sphere, icosahedron, octahedron, SpherePoint, SphereSystem};
use clap::ValueEnum;
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Fields shared by every experiment document.
pub trait Experiment: Serialize + DeserializeOwned {
    fn seed_mut(&mut self) -> &mut u64;
    fn output_path_mut(&mut self) -> &mut Option<PathBuf>;
    fn format_mut(&mut self) -> &mut Format;
}

macro_rules! experiment {
    ($ty:ty) => {
        impl Experiment for $ty {
            fn seed_mut(&mut self) -> &mut u64 {
                &mut self.seed
            }
            fn output_path_mut(&mut self) -> &mut Option<PathBuf> {
                &mut self.output_path
            }
            fn format_mut(&mut self) -> &mut Format {
                &mut self.format
            }
        }
    };
}

/// A support on the sphere: a named configuration or explicit points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Octahedron,
    Icosahedron,
    Fibonacci {
        n: usize,
    },
    Explicit {
        points: Vec<SpherePoint>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
}

impl SystemSpec {
    pub fn build(&self, tau: f64) -> causal_core::Result<SphereSystem> {
        match self {
            Self::Octahedron => SphereSystem::uniform(tau, octahedron()),
            Self::Icosahedron => SphereSystem::uniform(tau, icosahedron()),
            Self::Fibonacci { n } => SphereSystem::uniform(tau, fibonacci_sphere(*n)),
            Self::Explicit {
                points,
                weights: None,
            } => SphereSystem::uniform(tau, points.clone()),
            Self::Explicit {
                points,
                weights: Some(w),
            } => SphereSystem::new(tau, points.clone(), w.clone()),
        }
    }
}

/// A jet on the support: a coordinate basis vector, seeded random data, or
/// explicit values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum JetSpec {
    Basis(usize),
    Random,
    Explicit(Jet),
}

impl JetSpec {
    pub fn build<R: Rng>(&self, sys: &SphereSystem, rng: &mut R) -> Result<Jet, Failure> {
        let jet = match self {
            Self::Basis(k) => {
                if *k >= 3 * sys.len() {
                    return Err(Failure::Config(format!(
                        "basis jet {k} out of range 0..{}",
                        3 * sys.len()
                    )));
                }
                basis_jet(sys, *k)
            }
            Self::Random => Jet {
                b: (0..sys.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                v: sys
                    .points()
                    .iter()
                    .map(|x| {
                        let [e1, e2] = x.tangent_frame();
                        let (a, b): (f64, f64) =
                            (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        [0, 1, 2].map(|k| a * e1[k] + b * e2[k])
                    })
                    .collect(),
            },
            Self::Explicit(jet) => jet.clone(),
        };
        jet.validate(sys).map_err(Failure::from)?;
        Ok(jet)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimizeConfig {
    pub tau: f64,
    #[serde(default)]
    pub minimizer: MinimizerConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}
experiment!(MinimizeConfig);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub taus: Vec<f64>,
    #[serde(default)]
    pub minimizer: MinimizerConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}
experiment!(SweepConfig);

fn default_support_threshold() -> f64 {
    causal_core::jets::DEFAULT_SUPPORT_THRESHOLD
}

fn default_probe_points() -> usize {
    causal_core::jets::DEFAULT_PROBE_POINTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElCheckConfig {
    pub tau: f64,
    pub system: SystemSpec,
    #[serde(default = "default_support_threshold")]
    pub support_threshold: f64,
    #[serde(default = "default_probe_points")]
    pub probe_points: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}
experiment!(ElCheckConfig);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaplacianConfig {
    pub tau: f64,
    pub system: SystemSpec,
    /// Estimated from the Euler–Lagrange residual when absent.
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}
experiment!(LaplacianConfig);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub id: String,
    pub inside: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub tau: f64,
    pub system: SystemSpec,
    pub regions: Vec<RegionSpec>,
    pub u: JetSpec,
    pub v: JetSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}
experiment!(SurfaceConfig);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveSource {
    #[default]
    WaveEquation,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub nt: usize,
    pub nx: usize,
    pub dt: f64,
    pub dx: f64,
    /// Number of wave functions.
    pub f: usize,
    /// Weight-descent sweeps on the toy action; zero only evaluates it.
    #[serde(default)]
    pub steps: usize,
    #[serde(default)]
    pub source: WaveSource,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}
experiment!(LatticeConfig);

impl LatticeConfig {
    pub fn spec(&self) -> LatticeSpec {
        LatticeSpec {
            nt: self.nt,
            nx: self.nx,
            dt: self.dt,
            dx: self.dx,
        }
    }
}

fn default_rel_tol() -> f64 {
    causal_core::kernel::DEFAULT_CLASSIFY_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub tau: f64,
    pub system: SystemSpec,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}
experiment!(ClassifyConfig);

fn default_samples() -> usize {
    181
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub tau: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}
experiment!(ProfileConfig);

pub fn load<T: Experiment>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("invalid config {}: {e}", path.display())))
}

/// SHA-256 of the resolved parameters. The output location is not part of
/// the experiment and is left out.
pub fn config_hash<T: Experiment + Clone>(command: &str, cfg: &T) -> String {
    let mut scrubbed = cfg.clone();
    *scrubbed.output_path_mut() = None;
    let mut hasher = Sha256::new();
    hasher.update(command.as_bytes());
    hasher.update([0]);
    hasher.update(serde_json::to_vec(&scrubbed).expect("configs serialize"));
    hex::encode(hasher.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_rejected() {
        let err = serde_json::from_str::<ProfileConfig>(r#"{"tau": 2.0, "colour": 1}"#);
        assert!(err.is_err());
        let err =
            serde_json::from_str::<MinimizeConfig>(r#"{"tau": 2.0, "minimizer": {"restart": 3}}"#);
        assert!(err.is_err());
    }

    #[test]
    fn system_specs_parse() {
        let c: ClassifyConfig =
            serde_json::from_str(r#"{"tau": 1.5, "system": "octahedron"}"#).unwrap();
        assert_eq!(c.system, SystemSpec::Octahedron);
        let c: ClassifyConfig = serde_json::from_str(
            r#"{"tau": 1.5, "system": {"explicit": {"points": [[0,0,1],[1,0,0]]}}}"#,
        )
        .unwrap();
        assert_eq!(c.system.build(1.5).unwrap().weights(), &[0.5, 0.5]);
        let s: SurfaceConfig = serde_json::from_str(
            r#"{"tau": 2, "system": {"fibonacci": {"n": 4}}, "regions": [], "u": {"basis": 0}, "v": "random"}"#,
        )
        .unwrap();
        assert_eq!(s.u, JetSpec::Basis(0));
        assert_eq!(s.v, JetSpec::Random);
    }

    #[test]
    fn hash_ignores_output_path() {
        let mut a: ProfileConfig = serde_json::from_str(r#"{"tau": 2.0}"#).unwrap();
        let h = config_hash("profile", &a);
        a.output_path = Some("elsewhere".into());
        assert_eq!(config_hash("profile", &a), h);
        a.seed = 1;
        assert_ne!(config_hash("profile", &a), h);
        assert_ne!(config_hash("classify", &a), config_hash("profile", &a));
    }
}
