//! Fuzzy c-means clustering of task locations.
//!
//! Standard alternating (Bezdek) iterations on the squared-distance
//! objective `J = sum_i sum_j b_ij^gamma * |x_j - r_i|^2`. The
//! unsquared-distance variant of the objective is reported alongside it as a
//! diagnostic.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::scenario::Point2D;

/// Distances below this are treated as "task sits on the center".
pub const COINCIDENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FcmConfig {
    /// Fuzzifier; must be strictly greater than 1.
    pub gamma: f64,
    /// Stop once the objective changes by less than this between iterations.
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for FcmConfig {
    fn default() -> Self {
        Self { gamma: 2.0, tol: 1e-5, max_iters: 300, seed: 0 }
    }
}

impl FcmConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 1.0) {
            return Err(Error::param(format!("fuzzifier gamma must be > 1, got {}", self.gamma)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::param(format!("tolerance must be > 0, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Soft cluster memberships, `clusters x tasks`, column-stochastic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipMatrix {
    clusters: usize,
    tasks: usize,
    /// Row-major: `b[i * tasks + j]` is task `j`'s membership in cluster `i`.
    b: Vec<f64>,
    pub centers: Vec<Point2D>,
    pub gamma: f64,
    /// Squared-distance objective at the returned memberships and centers.
    pub objective: f64,
    /// Same sum with unsquared distances.
    pub linear_objective: f64,
    /// Squared-distance objective after initialization and after every iteration.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Set when every task sits at the same location; memberships are then uniform.
    pub degenerate: bool,
}

impl MembershipMatrix {
    pub fn clusters(&self) -> usize {
        self.clusters
    }

    pub fn tasks(&self) -> usize {
        self.tasks
    }

    pub fn membership_of(&self, cluster: usize, task_index: usize) -> Result<f64> {
        if cluster >= self.clusters || task_index >= self.tasks {
            return Err(Error::Index(format!(
                "membership ({cluster}, {task_index}) outside {} clusters x {} tasks",
                self.clusters, self.tasks
            )));
        }
        Ok(self.b[cluster * self.tasks + task_index])
    }

    /// Unchecked read for hot loops inside the crate.
    pub(crate) fn get(&self, cluster: usize, task_index: usize) -> f64 {
        self.b[cluster * self.tasks + task_index]
    }

    pub fn row(&self, cluster: usize) -> &[f64] {
        &self.b[cluster * self.tasks..(cluster + 1) * self.tasks]
    }

    pub fn column(&self, task_index: usize) -> Vec<f64> {
        (0..self.clusters).map(|i| self.get(i, task_index)).collect()
    }

    /// Cluster with the largest membership for a task; lowest index on ties.
    pub fn dominant_cluster(&self, task_index: usize) -> usize {
        let mut best = 0;
        for i in 1..self.clusters {
            if self.get(i, task_index) > self.get(best, task_index) {
                best = i;
            }
        }
        best
    }

    /// Writes one row per cluster, one column per task id.
    pub fn write_csv<W: Write>(&self, out: W, task_ids: &[usize]) -> Result<()> {
        if task_ids.len() != self.tasks {
            return Err(Error::param("task id list does not match the membership matrix"));
        }
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["cluster".to_string()];
        header.extend(task_ids.iter().map(|id| id.to_string()));
        w.write_record(&header)?;
        for i in 0..self.clusters {
            let mut record = vec![i.to_string()];
            record.extend(self.row(i).iter().map(|b| b.to_string()));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Closed-form membership update for fixed centers, returned row-major
/// `centers.len() x points.len()`.
pub fn memberships_for_centers(points: &[Point2D], centers: &[Point2D], gamma: f64) -> Vec<f64> {
    let m = centers.len();
    let n = points.len();
    let exponent = 2.0 / (gamma - 1.0);
    let mut b = vec![0.0; m * n];
    let mut dist = vec![0.0; m];
    for (j, p) in points.iter().enumerate() {
        let mut nearest = 0;
        for (i, c) in centers.iter().enumerate() {
            dist[i] = p.distance(c);
            if dist[i] < dist[nearest] {
                nearest = i;
            }
        }
        let d_min = dist[nearest];
        if d_min < COINCIDENT_EPS {
            b[nearest * n + j] = 1.0;
            continue;
        }
        // (d_min / d_i)^p lies in (0, 1], so no overflow for gamma near 1.
        let mut total = 0.0;
        for i in 0..m {
            let w = (d_min / dist[i]).powf(exponent);
            b[i * n + j] = w;
            total += w;
        }
        for i in 0..m {
            b[i * n + j] /= total;
        }
    }
    b
}

fn objectives(points: &[Point2D], centers: &[Point2D], b: &[f64], gamma: f64) -> (f64, f64) {
    let n = points.len();
    let mut squared = 0.0;
    let mut linear = 0.0;
    for (i, c) in centers.iter().enumerate() {
        for (j, p) in points.iter().enumerate() {
            let bij = b[i * n + j];
            if bij == 0.0 {
                continue;
            }
            let weight = bij.powf(gamma);
            let d = p.distance(c);
            squared += weight * d * d;
            linear += weight * d;
        }
    }
    (squared, linear)
}

fn update_centers(points: &[Point2D], b: &[f64], gamma: f64, previous: &[Point2D]) -> Vec<Point2D> {
    let n = points.len();
    previous
        .iter()
        .enumerate()
        .map(|(i, prev)| {
            let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
            for (j, p) in points.iter().enumerate() {
                let w = b[i * n + j].powf(gamma);
                sx += w * p.x;
                sy += w * p.y;
                sw += w;
            }
            // A cluster that owns nothing contributes nothing to J wherever it sits.
            if sw > 0.0 {
                Point2D::new(sx / sw, sy / sw)
            } else {
                *prev
            }
        })
        .collect()
}

/// Greedy farthest-point seeding: a seeded random first center, then
/// repeatedly the task farthest from every chosen center.
fn seed_centers(points: &[Point2D], m: usize, seed: u64) -> Vec<Point2D> {
    let mut rng = rng::stream(seed, rng::Stream::ClusterSeeding);
    let mut centers = vec![points[rng.gen_range(0..points.len())]];
    let mut nearest: Vec<f64> = points.iter().map(|p| p.distance(&centers[0])).collect();
    while centers.len() < m {
        let mut far = 0;
        for j in 1..points.len() {
            if nearest[j] > nearest[far] {
                far = j;
            }
        }
        let c = points[far];
        for (j, p) in points.iter().enumerate() {
            nearest[j] = nearest[j].min(p.distance(&c));
        }
        centers.push(c);
    }
    centers
}

pub fn fcm_cluster(points: &[Point2D], m: usize, cfg: &FcmConfig) -> Result<MembershipMatrix> {
    cfg.validate()?;
    let n = points.len();
    if m == 0 {
        return Err(Error::param("cluster count must be at least 1"));
    }
    if n < m {
        return Err(Error::param(format!("{n} tasks cannot form {m} clusters")));
    }
    if let Some(j) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::param(format!("task location {j} is not finite")));
    }

    if points.iter().all(|p| p.distance(&points[0]) < COINCIDENT_EPS) {
        return Ok(MembershipMatrix {
            clusters: m,
            tasks: n,
            b: vec![1.0 / m as f64; m * n],
            centers: vec![points[0]; m],
            gamma: cfg.gamma,
            objective: 0.0,
            linear_objective: 0.0,
            objective_history: vec![0.0],
            iterations: 0,
            converged: true,
            degenerate: true,
        });
    }

    let mut centers = seed_centers(points, m, cfg.seed);
    let mut b = memberships_for_centers(points, &centers, cfg.gamma);
    let (mut objective, mut linear) = objectives(points, &centers, &b, cfg.gamma);
    let mut history = vec![objective];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iters {
        iterations += 1;
        centers = update_centers(points, &b, cfg.gamma, &centers);
        b = memberships_for_centers(points, &centers, cfg.gamma);
        let (next, next_linear) = objectives(points, &centers, &b, cfg.gamma);
        history.push(next);
        let change = (objective - next).abs();
        objective = next;
        linear = next_linear;
        if change < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(MembershipMatrix {
        clusters: m,
        tasks: n,
        b,
        centers,
        gamma: cfg.gamma,
        objective,
        linear_objective: linear,
        objective_history: history,
        iterations,
        converged,
        degenerate: false,
    })
}
