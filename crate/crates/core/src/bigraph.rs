//! Per-iteration weighted bipartite graph between active robots and the
//! nodes they may visit next.
//!
//! Edge weight for robot `i` and task `j`:
//!
//! ```text
//! w_ij = K_b * b*_ij * (c_cum_i + 1) / (c_ij + 1)^2
//! ```
//!
//! where `b*_ij` is task `j`'s membership in the cluster robot `i` is
//! associated with, `c_cum_i` the robot's cost so far and `c_ij` the cost of
//! driving from the robot's current node to `j`. The depot (node 0) uses
//! `b* = 1` and the return distance.

use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcm::MembershipMatrix;
use crate::scenario::{CostMatrix, RobotState, DEPOT};

pub const DEFAULT_K_B: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub k_b: f64,
}

impl Default for WeightParams {
    fn default() -> Self {
        Self { k_b: DEFAULT_K_B }
    }
}

impl WeightParams {
    pub fn new(k_b: f64) -> Result<Self> {
        if !(k_b.is_finite() && k_b > 0.0) {
            return Err(Error::param(format!("K_b must be positive, got {k_b}")));
        }
        Ok(Self { k_b })
    }
}

pub fn edge_weight(b_star: f64, c_cum: f64, c_ij: f64, k_b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&b_star) {
        return Err(Error::param(format!("membership {b_star} outside [0, 1]")));
    }
    if !(c_cum.is_finite() && c_cum >= 0.0) {
        return Err(Error::param(format!("cumulative cost {c_cum} must be finite and >= 0")));
    }
    if !(c_ij.is_finite() && c_ij >= 0.0) {
        return Err(Error::param(format!("travel cost {c_ij} must be finite and >= 0")));
    }
    if !(k_b.is_finite() && k_b > 0.0) {
        return Err(Error::param(format!("K_b must be positive, got {k_b}")));
    }
    let denom = c_ij + 1.0;
    Ok(k_b * b_star * (c_cum + 1.0) / (denom * denom))
}

/// Where the `b*` factor comes from.
#[derive(Debug, Clone, Copy)]
pub enum Memberships<'a> {
    /// Fuzzy memberships; a robot is associated with the dominant cluster of
    /// the task it currently occupies.
    Fuzzy(&'a MembershipMatrix),
    /// Every robot/task pair gets the same value (clustering disabled).
    Constant(f64),
}

impl Memberships<'_> {
    /// Cluster a robot standing on `node` is associated with, if any.
    pub fn association(&self, node: usize) -> Option<usize> {
        match self {
            Memberships::Fuzzy(mm) => {
                if node == DEPOT || node > mm.tasks() {
                    None
                } else {
                    Some(mm.dominant_cluster(node - 1))
                }
            }
            Memberships::Constant(_) => Some(0),
        }
    }

    pub fn b_star(&self, cluster: usize, task_id: usize) -> f64 {
        match self {
            Memberships::Fuzzy(mm) => mm.get(cluster, task_id - 1),
            Memberships::Constant(v) => *v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub robot: usize,
    pub node: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Bigraph {
    pub robot_vertices: Vec<usize>,
    pub task_vertices: Vec<usize>,
    pub edges: Vec<Edge>,
}

impl Bigraph {
    /// Assembles a graph from explicit parts, checking the bipartite
    /// structure: endpoints on opposite sides, one edge per pair, finite
    /// non-negative weights.
    pub fn new(robot_vertices: Vec<usize>, task_vertices: Vec<usize>, edges: Vec<Edge>) -> Result<Self> {
        let robots: BTreeSet<_> = robot_vertices.iter().copied().collect();
        let nodes: BTreeSet<_> = task_vertices.iter().copied().collect();
        if robots.len() != robot_vertices.len() {
            return Err(Error::param("duplicate robot vertex"));
        }
        if nodes.len() != task_vertices.len() {
            return Err(Error::param("duplicate task vertex"));
        }
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !robots.contains(&e.robot) || !nodes.contains(&e.node) {
                return Err(Error::param(format!("edge ({}, {}) leaves the bipartition", e.robot, e.node)));
            }
            if !(e.weight.is_finite() && e.weight >= 0.0) {
                return Err(Error::param(format!("edge ({}, {}) has weight {}", e.robot, e.node, e.weight)));
            }
            if !seen.insert((e.robot, e.node)) {
                return Err(Error::param(format!("parallel edge ({}, {})", e.robot, e.node)));
            }
        }
        Ok(Self { robot_vertices, task_vertices, edges })
    }

    pub fn weight(&self, robot: usize, node: usize) -> Option<f64> {
        self.edges.iter().find(|e| e.robot == robot && e.node == node).map(|e| e.weight)
    }

    pub fn edges_of(&self, robot: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.robot == robot)
    }

    pub fn has_depot(&self) -> bool {
        self.task_vertices.contains(&DEPOT)
    }

    /// `robot_id,node_id,weight` edge list.
    pub fn write_edges_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["robot_id", "node_id", "weight"])?;
        for e in &self.edges {
            w.write_record([e.robot.to_string(), e.node.to_string(), e.weight.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BigraphParams {
    pub weights: WeightParams,
    pub task_cap: usize,
    pub depot_enabled: bool,
}

/// Builds the bigraph for one decision round.
///
/// Finished robots are left out. A robot below the cap gets an edge to every
/// remaining task. When the depot is enabled a robot also gets a depot edge,
/// provided the other active robots still have enough spare capacity to cover
/// every remaining task without it; a robot at the cap gets only that edge.
pub fn build_bigraph(
    robots: &[RobotState],
    remaining: &[usize],
    memberships: &Memberships<'_>,
    costs: &CostMatrix,
    params: &BigraphParams,
) -> Result<Bigraph> {
    if remaining.is_empty() && !params.depot_enabled {
        return Err(Error::param("no remaining tasks and the depot is not enabled"));
    }
    let mut tasks: Vec<usize> = remaining.to_vec();
    tasks.sort_unstable();
    if tasks.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::param("remaining task list contains duplicates"));
    }
    if let Some(&bad) = tasks.iter().find(|&&t| t == DEPOT || t >= costs.size()) {
        return Err(Error::param(format!("{bad} is not a task node")));
    }

    let mut active: Vec<&RobotState> = robots.iter().filter(|r| !r.finished).collect();
    active.sort_by_key(|r| r.robot_id);
    let spare = |r: &RobotState| params.task_cap.saturating_sub(r.tasks_done);
    let total_spare: usize = active.iter().map(|r| spare(r)).sum();

    let mut edges = Vec::new();
    for robot in &active {
        if params.depot_enabled && total_spare - spare(robot) >= tasks.len() {
            let back = costs.get(robot.current_node, DEPOT);
            let w = edge_weight(1.0, robot.cumulative_cost, back, params.weights.k_b)?;
            edges.push(Edge { robot: robot.robot_id, node: DEPOT, weight: w });
        }
        if spare(robot) == 0 || tasks.is_empty() {
            continue;
        }
        let cluster = memberships.association(robot.current_node).ok_or_else(|| {
            Error::State(format!(
                "robot {} at node {} has no cluster association",
                robot.robot_id, robot.current_node
            ))
        })?;
        for &task in &tasks {
            let b = memberships.b_star(cluster, task);
            let c = costs.get(robot.current_node, task);
            let w = edge_weight(b, robot.cumulative_cost, c, params.weights.k_b)?;
            edges.push(Edge { robot: robot.robot_id, node: task, weight: w });
        }
    }

    let mut task_vertices = Vec::with_capacity(tasks.len() + 1);
    if params.depot_enabled {
        task_vertices.push(DEPOT);
    }
    task_vertices.extend(tasks);
    Ok(Bigraph { robot_vertices: active.iter().map(|r| r.robot_id).collect(), task_vertices, edges })
}
