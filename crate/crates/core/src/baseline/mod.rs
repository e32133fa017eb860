//! Centralized mTSP benchmark.
//!
//! [`build_milp`] encodes the single-depot, capacity-capped mTSP as a MILP
//! with Miller-Tucker-Zemlin ordering variables; node 0 is the depot:
//!
//! ```text
//! min   sum_{i != j} c_ij z_ij
//! s.t.  sum_j z_0j = m                      (depart)
//!       sum_i z_i0 = m                      (return)
//!       sum_i z_ij = 1        j = 1..n      (in_j)
//!       sum_j z_ij = 1        i = 1..n      (out_i)
//!       u_i - u_j + h z_ij <= h - 1         i != j, both tasks (mtz_i_j)
//!       1 <= u_i <= h,  z binary,  u integer
//! ```
//!
//! The model can be exported as an LP file for external solvers
//! ([`lp`]) or solved exactly at desk scale ([`solve_exact`]).

mod exact;
pub mod lp;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::allocation::Plan;
use crate::error::{Error, Result};
use crate::scenario::{CostMatrix, DEPOT};

pub use exact::{root_lower_bound, solve_exact, ExactSolution, EXACT_MAX_TASKS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Some robot travels from node `i` straight to node `j`.
    Z(usize, usize),
    /// Position of task `i` within its tour.
    U(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Z(i, j) => write!(f, "z_{i}_{j}"),
            Var::U(i) => write!(f, "u_{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(&self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }

    fn holds(&self, lhs: f64, rhs: f64) -> bool {
        const EPS: f64 = 1e-9;
        match self {
            Sense::Le => lhs <= rhs + EPS,
            Sense::Eq => (lhs - rhs).abs() <= EPS,
            Sense::Ge => lhs >= rhs - EPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub name: String,
    pub terms: Vec<(Var, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    /// Tasks plus the depot.
    pub n_nodes: usize,
    pub m: usize,
    pub h: usize,
    pub costs: CostMatrix,
    pub objective: Vec<(Var, f64)>,
    pub constraints: Vec<LinearConstraint>,
}

/// A candidate assignment of the model's variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MilpPoint {
    /// Arcs with `z_ij = 1`.
    pub arcs: BTreeSet<(usize, usize)>,
    /// `u[i]` for task `i`; index 0 unused.
    pub order: Vec<f64>,
}

impl MilpPoint {
    pub fn value(&self, var: Var) -> f64 {
        match var {
            Var::Z(i, j) => f64::from(u8::from(self.arcs.contains(&(i, j)))),
            Var::U(i) => self.order.get(i).copied().unwrap_or(0.0),
        }
    }
}

pub fn build_milp(costs: &CostMatrix, m: usize, h: usize) -> Result<MilpModel> {
    let n_nodes = costs.size();
    let n = n_nodes.saturating_sub(1);
    if m == 0 || n < m {
        return Err(Error::param(format!("need 1 <= m <= n, got m={m}, n={n}")));
    }
    if h == 0 || h * m < n {
        return Err(Error::param(format!("cap {h} x {m} robots cannot cover {n} tasks")));
    }

    let arcs = || (0..n_nodes).flat_map(|i| (0..n_nodes).filter(move |&j| j != i).map(move |j| (i, j)));
    let objective = arcs().map(|(i, j)| (Var::Z(i, j), costs.get(i, j))).collect();

    let mut constraints = Vec::with_capacity(2 + 2 * n + n * n.saturating_sub(1));
    constraints.push(LinearConstraint {
        name: "depart".into(),
        terms: (1..n_nodes).map(|j| (Var::Z(DEPOT, j), 1.0)).collect(),
        sense: Sense::Eq,
        rhs: m as f64,
    });
    constraints.push(LinearConstraint {
        name: "return".into(),
        terms: (1..n_nodes).map(|i| (Var::Z(i, DEPOT), 1.0)).collect(),
        sense: Sense::Eq,
        rhs: m as f64,
    });
    for j in 1..n_nodes {
        constraints.push(LinearConstraint {
            name: format!("in_{j}"),
            terms: (0..n_nodes).filter(|&i| i != j).map(|i| (Var::Z(i, j), 1.0)).collect(),
            sense: Sense::Eq,
            rhs: 1.0,
        });
    }
    for i in 1..n_nodes {
        constraints.push(LinearConstraint {
            name: format!("out_{i}"),
            terms: (0..n_nodes).filter(|&j| j != i).map(|j| (Var::Z(i, j), 1.0)).collect(),
            sense: Sense::Eq,
            rhs: 1.0,
        });
    }
    let hf = h as f64;
    for i in 1..n_nodes {
        for j in 1..n_nodes {
            if i == j {
                continue;
            }
            constraints.push(LinearConstraint {
                name: format!("mtz_{i}_{j}"),
                terms: vec![(Var::U(i), 1.0), (Var::U(j), -1.0), (Var::Z(i, j), hf)],
                sense: Sense::Le,
                rhs: hf - 1.0,
            });
        }
    }
    Ok(MilpModel { n_nodes, m, h, costs: costs.clone(), objective, constraints })
}

impl MilpModel {
    pub fn task_count(&self) -> usize {
        self.n_nodes - 1
    }

    pub fn binaries(&self) -> impl Iterator<Item = Var> + '_ {
        self.objective.iter().map(|(v, _)| *v)
    }

    pub fn integers(&self) -> impl Iterator<Item = Var> {
        (1..self.n_nodes).map(Var::U)
    }

    /// Bounds on every ordering variable `u_i`.
    pub fn order_bounds(&self) -> (f64, f64) {
        (1.0, self.h as f64)
    }

    pub fn objective_value(&self, point: &MilpPoint) -> f64 {
        self.objective.iter().map(|(v, c)| c * point.value(*v)).sum()
    }

    /// Names of constraints (and bounds) the point violates.
    pub fn violated(&self, point: &MilpPoint) -> Vec<String> {
        let mut out: Vec<String> = self
            .constraints
            .iter()
            .filter(|c| {
                let lhs: f64 = c.terms.iter().map(|(v, a)| a * point.value(*v)).sum();
                !c.sense.holds(lhs, c.rhs)
            })
            .map(|c| c.name.clone())
            .collect();
        let (lo, hi) = self.order_bounds();
        for i in 1..self.n_nodes {
            let u = point.value(Var::U(i));
            if u < lo || u > hi {
                out.push(format!("bound_u_{i}"));
            }
        }
        for &(i, j) in &point.arcs {
            if i == j || i >= self.n_nodes || j >= self.n_nodes {
                out.push(format!("arc_{i}_{j}"));
            }
        }
        out
    }

    /// Encodes closed depot tours as a model point (`u_i` = 1-based
    /// position of task `i` in its tour).
    pub fn encode_tours(&self, tours: &[Vec<usize>]) -> MilpPoint {
        let mut point = MilpPoint { arcs: BTreeSet::new(), order: vec![0.0; self.n_nodes] };
        for tour in tours {
            for w in tour.windows(2) {
                point.arcs.insert((w[0], w[1]));
            }
            for (pos, &node) in tour.iter().enumerate() {
                if node != DEPOT && node < self.n_nodes {
                    point.order[node] = pos as f64;
                }
            }
        }
        point
    }

    pub fn to_lp_string(&self) -> String {
        lp::write_lp(self)
    }
}

pub fn emit_lp(model: &MilpModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, model.to_lp_string())?;
    Ok(())
}

/// Team cost: every traversed edge of every tour.
pub fn overall_cost(tours: &[Vec<usize>], costs: &CostMatrix) -> f64 {
    tours.iter().map(|t| costs.path_cost(t)).sum()
}

/// Solution file: a plan plus solver provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    #[serde(flatten)]
    pub plan: Plan,
    pub proven_optimal: bool,
    pub nodes_explored: u64,
}

impl SolutionFile {
    pub fn new(solution: &ExactSolution, costs: &CostMatrix) -> Self {
        Self {
            plan: Plan::from_tours(&solution.tours, costs),
            proven_optimal: solution.proven_optimal,
            nodes_explored: solution.nodes_explored,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Reads only the `routes[].nodes` lists of a plan or solution file, e.g. one
/// produced by an external solver from an exported LP file.
pub fn load_tours(text: &str) -> Result<Vec<Vec<usize>>> {
    #[derive(Deserialize)]
    struct Nodes {
        nodes: Vec<usize>,
    }
    #[derive(Deserialize)]
    struct Routes {
        routes: Vec<Nodes>,
    }
    let routes: Routes = serde_json::from_str(text).map_err(|e| Error::parse("routes", e.to_string()))?;
    Ok(routes.routes.into_iter().map(|r| r.nodes).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Point2D;

    fn line_costs(n: usize) -> CostMatrix {
        let pts: Vec<_> = (0..=n).map(|k| Point2D::new(k as f64, 0.0)).collect();
        CostMatrix::euclidean(&pts)
    }

    #[test]
    fn constraint_counts() {
        let model = build_milp(&line_costs(3), 2, 2).unwrap();
        assert_eq!(model.constraints.len(), 14);
        assert_eq!(model.constraints.iter().filter(|c| c.name.starts_with("mtz_")).count(), 6);
        assert_eq!(model.objective.len(), 12);
    }

    #[test]
    fn rejects_infeasible_parameters() {
        assert!(build_milp(&line_costs(3), 4, 1).is_err());
        assert!(build_milp(&line_costs(3), 1, 2).is_err());
        assert!(build_milp(&line_costs(3), 0, 3).is_err());
    }

    #[test]
    fn one_task_per_robot_is_feasible() {
        let model = build_milp(&line_costs(3), 3, 1).unwrap();
        let point = model.encode_tours(&[vec![0, 1, 0], vec![0, 2, 0], vec![0, 3, 0]]);
        assert!(model.violated(&point).is_empty());
    }

    #[test]
    fn objective_matches_route_costs() {
        let costs = line_costs(4);
        let model = build_milp(&costs, 2, 3).unwrap();
        let tours = vec![vec![0, 2, 1, 0], vec![0, 3, 4, 0]];
        let point = model.encode_tours(&tours);
        assert!(model.violated(&point).is_empty());
        // 2 + 1 + 1 and 3 + 1 + 4.
        assert_eq!(model.objective_value(&point), 12.0);
        assert_eq!(overall_cost(&tours, &costs), 12.0);
    }

    #[test]
    fn subtours_and_overlong_tours_are_infeasible() {
        let costs = line_costs(4);
        let model = build_milp(&costs, 1, 4).unwrap();
        // Tasks 3 and 4 form a loop that never meets the depot.
        let mut point = model.encode_tours(&[vec![0, 1, 2, 0]]);
        point.arcs.insert((3, 4));
        point.arcs.insert((4, 3));
        point.order[3] = 1.0;
        point.order[4] = 2.0;
        assert!(model.violated(&point).iter().any(|c| c.starts_with("mtz_")));

        let capped = build_milp(&costs, 2, 2).unwrap();
        let long = capped.encode_tours(&[vec![0, 1, 2, 3, 0], vec![0, 4, 0]]);
        assert!(!capped.violated(&long).is_empty());
    }

    #[test]
    fn out_and_back_cost() {
        let costs = line_costs(1);
        assert_eq!(overall_cost(&[vec![0, 1, 0]], &costs), 2.0);
    }

    #[test]
    fn tours_from_plan_json() {
        let text = r#"{"routes": [{"robot": 1, "nodes": [0, 2, 1, 0], "cost": 4.0}], "overall_cost": 4.0}"#;
        assert_eq!(load_tours(text).unwrap(), vec![vec![0, 2, 1, 0]]);
        assert!(load_tours("{}").is_err());
    }
}
