//! Minimization of the sphere action over weighted counting measures.
//!
//! Each restart starts from uniformly random points with equal weights and
//! alternates
//!
//! * a Riemannian gradient step on the positions, preconditioned by the
//!   point weights so that every point follows the gradient of the
//!   potential `ℓ(x) = Σ_j c_j 𝓛(x, x_j)` (points of vanishing weight keep
//!   moving and can find gaps in the support),
//! * a projected gradient step on the weight simplex with exact line search
//!   along the projected direction (the action is quadratic in the weights),
//! * during the annealing schedule, Metropolis single-point kicks.
//!
//! Support maintenance prunes negligible weights and merges coincident
//! points. Restarts run in parallel; each uses its own seeded stream.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::el_residual_with;
use crate::sphere::{
    action_of, boundary_angle, grad_sphere_lagrangian, sphere_action, sphere_lagrangian, vec3,
    SpherePoint, SphereSystem, Vec3,
};
use crate::sum::{sum, Neumaier};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnealStage {
    pub temperature: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinimizerConfig {
    pub initial_points: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub step_position: f64,
    pub step_weight: f64,
    pub prune_threshold: f64,
    /// Radians.
    pub merge_angle: f64,
    pub anneal_schedule: Vec<AnnealStage>,
    pub convergence_tol: f64,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        Self {
            initial_points: 100,
            restarts: 8,
            max_iters: 20_000,
            seed: 0,
            step_position: 1e-2,
            step_weight: 1e-2,
            prune_threshold: 1e-6,
            merge_angle: 2f64.to_radians(),
            anneal_schedule: vec![
                AnnealStage {
                    temperature: 1e-2,
                    iterations: 200,
                },
                AnnealStage {
                    temperature: 1e-3,
                    iterations: 200,
                },
                AnnealStage {
                    temperature: 1e-4,
                    iterations: 200,
                },
            ],
            convergence_tol: 1e-10,
        }
    }
}

impl MinimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.initial_points == 0 || self.restarts == 0 || self.max_iters == 0 {
            return bad("initial_points, restarts and max_iters must be positive");
        }
        for (name, v) in [
            ("step_position", self.step_position),
            ("step_weight", self.step_weight),
            ("prune_threshold", self.prune_threshold),
            ("merge_angle", self.merge_angle),
            ("convergence_tol", self.convergence_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(&format!("{name} must be positive"));
            }
        }
        let mut last = f64::INFINITY;
        for stage in &self.anneal_schedule {
            if !(stage.temperature.is_finite() && stage.temperature >= 0.0) {
                return bad("anneal temperatures must be non-negative");
            }
            if stage.temperature > last {
                return bad("anneal temperatures must be non-increasing");
            }
            last = stage.temperature;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizerReport {
    pub final_system: SphereSystem,
    pub action: f64,
    pub cluster_count: usize,
    /// Radians; `π` for a single cluster.
    pub min_pairwise_angle: f64,
    pub el_spread: f64,
    pub restarts_actions: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
}

impl MinimizerReport {
    /// Spread `max − min` of the restart actions.
    pub fn restart_spread(&self) -> f64 {
        let max = self
            .restarts_actions
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let min = self
            .restarts_actions
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        max - min
    }
}

/// Maximum number of halvings in a position line search.
const MAX_BACKTRACK: usize = 40;
const MAX_POSITION_STEP: f64 = 0.5;
/// Iterations between support maintenance passes during descent.
const MAINTENANCE_INTERVAL: usize = 500;
/// Consecutive quiet iterations required to declare convergence.
const QUIET_ITERATIONS: usize = 20;

/// Mutable state of one restart. Exposed so the descent invariants can be
/// checked step by step.
#[derive(Debug, Clone)]
pub struct DescentState {
    tau: f64,
    points: Vec<SpherePoint>,
    weights: Vec<f64>,
    action: f64,
    eta_position: f64,
    eta_weight: f64,
    rng: ChaCha8Rng,
}

impl DescentState {
    pub fn random(tau: f64, count: usize, cfg: &MinimizerConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<SpherePoint> = (0..count).map(|_| SpherePoint::random(&mut rng)).collect();
        let weights = vec![1.0 / count as f64; count];
        Self::assemble(tau, points, weights, cfg, rng)
    }

    pub fn from_system(sys: &SphereSystem, cfg: &MinimizerConfig, seed: u64) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(seed);
        Self::assemble(
            sys.tau(),
            sys.points().to_vec(),
            sys.weights().to_vec(),
            cfg,
            rng,
        )
    }

    fn assemble(
        tau: f64,
        points: Vec<SpherePoint>,
        weights: Vec<f64>,
        cfg: &MinimizerConfig,
        rng: ChaCha8Rng,
    ) -> Self {
        let action = action_of(&points, &weights, tau);
        Self {
            tau,
            points,
            weights,
            action,
            eta_position: cfg.step_position,
            eta_weight: cfg.step_weight,
            rng,
        }
    }

    pub fn action(&self) -> f64 {
        self.action
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn system(&self) -> SphereSystem {
        SphereSystem::new_unnormalized(self.tau, self.points.clone(), self.weights.clone())
            .expect("descent keeps weights on the simplex")
    }

    fn potentials(&self) -> Vec<f64> {
        self.points
            .iter()
            .map(|x| {
                let mut acc = Neumaier::new();
                for (y, w) in self.points.iter().zip(&self.weights) {
                    if *w != 0.0 {
                        acc.add(w * sphere_lagrangian(x, y, self.tau));
                    }
                }
                acc.value()
            })
            .collect()
    }

    fn potential_gradients(&self) -> Vec<Vec3> {
        self.points
            .iter()
            .map(|x| {
                let mut g = [0.0; 3];
                for (y, w) in self.points.iter().zip(&self.weights) {
                    if *w != 0.0 {
                        g = vec3::axpy(&g, *w, &grad_sphere_lagrangian(x, y, self.tau));
                    }
                }
                g
            })
            .collect()
    }

    /// Backtracking step of every point along `−∇ℓ`; never increases the
    /// action. Returns whether the points moved.
    pub fn position_step(&mut self) -> bool {
        let grads = self.potential_gradients();
        if grads.iter().all(|g| vec3::norm(g) == 0.0) {
            return false;
        }
        let mut eta = self.eta_position;
        for _ in 0..MAX_BACKTRACK {
            let trial: Vec<SpherePoint> = self
                .points
                .iter()
                .zip(&grads)
                .map(|(x, g)| {
                    let step = vec3::scale(g, -eta);
                    // Cap each geodesic step so no point overshoots the sphere.
                    let len = vec3::norm(&step);
                    let step = if len > MAX_POSITION_STEP {
                        vec3::scale(&step, MAX_POSITION_STEP / len)
                    } else {
                        step
                    };
                    x.moved(&step)
                })
                .collect();
            let trial_action = action_of(&trial, &self.weights, self.tau);
            if trial_action <= self.action {
                self.points = trial;
                self.action = trial_action;
                self.eta_position = (eta * 1.5).min(1e3);
                return true;
            }
            eta *= 0.5;
        }
        self.eta_position = eta;
        false
    }

    /// Projected gradient step on the simplex followed by exact line search
    /// of the quadratic action along the projected direction.
    pub fn weight_step(&mut self) -> bool {
        let ell = self.potentials();
        let target: Vec<f64> = self
            .weights
            .iter()
            .zip(&ell)
            .map(|(c, l)| c - self.eta_weight * 2.0 * l)
            .collect();
        let projected = project_simplex(&target);
        let dir: Vec<f64> = projected
            .iter()
            .zip(&self.weights)
            .map(|(p, c)| p - c)
            .collect();
        if dir.iter().all(|d| *d == 0.0) {
            return false;
        }
        // S(c + t d) = S + 2t dᵀAc + t² dᵀAd with (Ac)_i = ℓ_i.
        let linear = sum(dir.iter().zip(&ell).map(|(d, l)| d * l));
        let quad = {
            let mut acc = Neumaier::new();
            for (i, x) in self.points.iter().enumerate() {
                if dir[i] == 0.0 {
                    continue;
                }
                for (j, y) in self.points.iter().enumerate() {
                    if dir[j] != 0.0 {
                        acc.add(dir[i] * dir[j] * sphere_lagrangian(x, y, self.tau));
                    }
                }
            }
            acc.value()
        };
        if linear >= 0.0 {
            self.eta_weight *= 0.5;
            return false;
        }
        let t = if quad > 0.0 {
            (-linear / quad).min(1.0)
        } else {
            1.0
        };
        let trial: Vec<f64> = if t >= 1.0 {
            projected
        } else {
            self.weights
                .iter()
                .zip(&dir)
                .map(|(c, d)| (c + t * d).max(0.0))
                .collect()
        };
        let trial = renormalize(trial);
        let trial_action = action_of(&self.points, &trial, self.tau);
        if trial_action <= self.action {
            self.weights = trial;
            self.action = trial_action;
            if t >= 1.0 {
                self.eta_weight = (self.eta_weight * 2.0).min(1e3);
            }
            true
        } else {
            self.eta_weight *= 0.5;
            false
        }
    }

    /// One Metropolis sweep of single-point moves at `temperature`; the
    /// proposal length is uniform in `[0, radius]`.
    pub fn kick(&mut self, temperature: f64, radius: f64) -> usize {
        let mut accepted = 0;
        for i in 0..self.points.len() {
            let [e1, e2] = self.points[i].tangent_frame();
            let theta: f64 = self.rng.gen_range(0.0..(2.0 * PI));
            let len: f64 = self.rng.gen_range(0.0..=radius);
            let dir = vec3::add(
                &vec3::scale(&e1, theta.cos()),
                &vec3::scale(&e2, theta.sin()),
            );
            let proposal = self.points[i].moved(&vec3::scale(&dir, len.tan()));
            let delta = if self.weights[i] == 0.0 {
                0.0
            } else {
                let mut acc = Neumaier::new();
                for (j, (y, w)) in self.points.iter().zip(&self.weights).enumerate() {
                    if j != i && *w != 0.0 {
                        acc.add(
                            w * (sphere_lagrangian(&proposal, y, self.tau)
                                - sphere_lagrangian(&self.points[i], y, self.tau)),
                        );
                    }
                }
                2.0 * self.weights[i] * acc.value()
            };
            let u: f64 = self.rng.gen();
            let accept = delta <= 0.0 || (temperature > 0.0 && u < (-delta / temperature).exp());
            if accept {
                self.points[i] = proposal;
                accepted += 1;
            }
        }
        self.action = action_of(&self.points, &self.weights, self.tau);
        accepted
    }

    /// Drops weights below `prune_threshold` and merges points closer than
    /// `merge_angle`. Returns whether the support changed.
    pub fn maintain(&mut self, prune_threshold: f64, merge_angle: f64) -> bool {
        let before = self.points.len();
        let keep: Vec<usize> = (0..before)
            .filter(|&i| self.weights[i] >= prune_threshold)
            .collect();
        if keep.is_empty() {
            return false;
        }
        let pts: Vec<SpherePoint> = keep.iter().map(|&i| self.points[i]).collect();
        let ws = renormalize(keep.iter().map(|&i| self.weights[i]).collect());
        let clusters = cluster_indices(&pts, &ws, merge_angle);
        let mut new_points = Vec::with_capacity(clusters.len());
        let mut new_weights = Vec::with_capacity(clusters.len());
        for members in clusters {
            let (center, total) = weighted_center(&pts, &ws, &members);
            new_points.push(center);
            new_weights.push(total);
        }
        let changed = new_points.len() != before;
        self.points = new_points;
        self.weights = renormalize(new_weights);
        self.action = action_of(&self.points, &self.weights, self.tau);
        changed
    }
}

fn renormalize(mut w: Vec<f64>) -> Vec<f64> {
    let total = sum(w.iter().copied());
    if total > 0.0 {
        for x in &mut w {
            *x /= total;
        }
    }
    w
}

/// Euclidean projection onto the probability simplex (sorted threshold).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// A group of support points within the merge radius of one another.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: SpherePoint,
    pub total_weight: f64,
    pub member_indices: Vec<usize>,
}

/// Weights below this are ignored when clustering.
const CLUSTER_WEIGHT_FLOOR: f64 = 1e-12;

fn cluster_indices(points: &[SpherePoint], weights: &[f64], merge_angle: f64) -> Vec<Vec<usize>> {
    let live: Vec<usize> = (0..points.len())
        .filter(|&i| weights[i] >= CLUSTER_WEIGHT_FLOOR)
        .collect();
    // Union-find over live points.
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let cos_merge = merge_angle.cos();
    for (a, &i) in live.iter().enumerate() {
        for &j in &live[a + 1..] {
            if merge_angle > 0.0 && points[i].cos_angle(&points[j]) >= cos_merge {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot: Vec<Option<usize>> = vec![None; points.len()];
    for &i in &live {
        let r = find(&mut parent, i);
        match root_slot[r] {
            Some(slot) => groups[slot].push(i),
            None => {
                root_slot[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

fn weighted_center(
    points: &[SpherePoint],
    weights: &[f64],
    members: &[usize],
) -> (SpherePoint, f64) {
    let total = sum(members.iter().map(|&i| weights[i]));
    if members.len() == 1 {
        return (points[members[0]], total);
    }
    let mut acc = [0.0; 3];
    for &i in members {
        acc = vec3::axpy(&acc, weights[i], points[i].coords());
    }
    let center = SpherePoint::from_direction(acc).unwrap_or(points[members[0]]);
    (center, total)
}

/// Single-linkage clusters by geodesic distance `≤ merge_angle`.
pub fn support_clusters(sys: &SphereSystem, merge_angle: f64) -> Vec<Cluster> {
    cluster_indices(sys.points(), sys.weights(), merge_angle)
        .into_iter()
        .map(|members| {
            let (center, total_weight) = weighted_center(sys.points(), sys.weights(), &members);
            Cluster {
                center,
                total_weight,
                member_indices: members,
            }
        })
        .collect()
}

/// Smallest angle between distinct points; `π` when fewer than two.
pub fn min_pairwise_angle(points: &[SpherePoint]) -> f64 {
    let mut min = PI;
    for i in 0..points.len() {
        for j in 0..i {
            min = min.min(points[i].angle(&points[j]));
        }
    }
    min
}

struct RestartOutcome {
    state: DescentState,
    iterations: usize,
    converged: bool,
}

fn run_restart(tau: f64, cfg: &MinimizerConfig, seed: u64) -> RestartOutcome {
    let mut state = DescentState::random(tau, cfg.initial_points, cfg, seed);
    let mut iterations = 0usize;
    let kick_radius = 0.5 * boundary_angle(tau).min(PI / 2.0);

    for stage in &cfg.anneal_schedule {
        for _ in 0..stage.iterations {
            if iterations >= cfg.max_iters {
                break;
            }
            state.position_step();
            state.weight_step();
            state.kick(stage.temperature, kick_radius);
            iterations += 1;
        }
    }

    let mut converged = false;
    let mut quiet = 0usize;
    let mut since_maintenance = 0usize;
    while iterations < cfg.max_iters {
        let before = state.action;
        state.position_step();
        state.weight_step();
        iterations += 1;
        since_maintenance += 1;
        if (before - state.action).abs() <= cfg.convergence_tol {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= QUIET_ITERATIONS || since_maintenance >= MAINTENANCE_INTERVAL {
            since_maintenance = 0;
            let changed = state.maintain(cfg.prune_threshold, cfg.merge_angle);
            if quiet >= QUIET_ITERATIONS && !changed {
                converged = true;
                break;
            }
            quiet = 0;
        }
    }
    if state.points.len() == 1 {
        converged = true;
    }
    RestartOutcome {
        state,
        iterations,
        converged,
    }
}

/// Seed of restart `k`; distinct streams per restart.
fn restart_seed(seed: u64, k: usize) -> u64 {
    seed ^ (k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs `cfg.restarts` seeded restarts and returns the best one.
pub fn minimize(tau: f64, cfg: &MinimizerConfig) -> Result<MinimizerReport> {
    if !(tau.is_finite() && tau >= 1.0) {
        return Err(Error::OutOfRange {
            value: tau,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    cfg.validate()?;
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| run_restart(tau, cfg, restart_seed(cfg.seed, k)))
        .collect();
    let restarts_actions: Vec<f64> = outcomes.iter().map(|o| o.state.action).collect();
    let best = outcomes
        .into_iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.state.action.total_cmp(&b.state.action).then(ia.cmp(ib)))
        .map(|(_, o)| o)
        .expect("at least one restart");

    let final_system =
        SphereSystem::new(tau, best.state.points.clone(), best.state.weights.clone())?;
    let action = sphere_action(&final_system);
    let el = el_residual_with(&final_system, cfg.prune_threshold, 0);
    Ok(MinimizerReport {
        cluster_count: support_clusters(&final_system, cfg.merge_angle).len(),
        min_pairwise_angle: min_pairwise_angle(final_system.points()),
        el_spread: el.el_spread,
        final_system,
        action,
        restarts_actions,
        iterations_used: best.iterations,
        converged: best.converged,
    })
}

/// One row of a `τ` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub tau: f64,
    pub best_action: f64,
    pub cluster_count: usize,
    pub min_angle: f64,
    pub el_spread: f64,
    pub boundary_angle: f64,
    pub converged: bool,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str =
        "tau,best_action,cluster_count,min_angle,el_spread,boundary_angle,converged";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{}",
            self.tau,
            self.best_action,
            self.cluster_count,
            self.min_angle,
            self.el_spread,
            self.boundary_angle,
            self.converged
        )
    }
}

/// Minimizes at every `τ`, rows in input order.
pub fn tau_sweep(tau_values: &[f64], cfg: &MinimizerConfig) -> Result<Vec<SweepRow>> {
    tau_values
        .iter()
        .map(|&tau| {
            let report = minimize(tau, cfg)?;
            Ok(SweepRow {
                tau,
                best_action: report.action,
                cluster_count: report.cluster_count,
                min_angle: report.min_pairwise_angle,
                el_spread: report.el_spread,
                boundary_angle: boundary_angle(tau),
                converged: report.converged,
            })
        })
        .collect()
}
