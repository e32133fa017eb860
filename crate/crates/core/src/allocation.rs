//! The decentralized allocation loop.
//!
//! 1. Cluster the task locations once (one cluster per robot), unless a
//!    constant membership is requested.
//! 2. Round 0: every robot leaves the depot for a distinct, uniformly drawn
//!    task.
//! 3. Rounds 1, 2, ...: each robot is associated with the dominant cluster of
//!    the task it stands on, the bigraph over the remaining tasks is built
//!    (the depot joins it from round 2 on) and the matching decides every
//!    robot's next node. A robot sent to the depot is done.
//! 4. Once no tasks remain, robots still out return to the depot.
//!
//! Every input of a round is shared state, so each robot can run
//! [`decision_step`] on its own and arrive at the same matching.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::bigraph::{build_bigraph, BigraphParams, Memberships, WeightParams, DEFAULT_K_B};
use crate::error::{Error, Result};
use crate::fcm::{fcm_cluster, FcmConfig, MembershipMatrix};
use crate::harness::agent_cost_stddev;
use crate::matching::{max_weight_max_cardinality_matching, Matching};
use crate::rng;
use crate::scenario::{CostMatrix, RobotState, Scenario, DEPOT};

/// First round in which robots may be matched back to the depot.
pub const DEPOT_OPENS_AT: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MembershipMode {
    Fcm,
    /// Skip clustering and use this `b*` for every robot/task pair.
    Constant(f64),
}

impl fmt::Display for MembershipMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MembershipMode::Fcm => write!(f, "fcm"),
            MembershipMode::Constant(v) => write!(f, "const:{v}"),
        }
    }
}

impl std::str::FromStr for MembershipMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("fcm") {
            return Ok(MembershipMode::Fcm);
        }
        let value = s
            .strip_prefix("const:")
            .ok_or_else(|| Error::param(format!("membership mode `{s}` is neither `fcm` nor `const:<v>`")))?;
        let v: f64 = value.parse().map_err(|_| Error::param(format!("`{value}` is not a number")))?;
        Ok(MembershipMode::Constant(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecMataParams {
    pub k_b: f64,
    pub fcm: FcmConfig,
    /// Seeds the round-0 task draw.
    pub seed: u64,
    pub membership_mode: MembershipMode,
}

impl DecMataParams {
    /// Defaults with both the clustering and the round-0 draw seeded by `seed`.
    pub fn seeded(seed: u64) -> Self {
        Self { k_b: DEFAULT_K_B, fcm: FcmConfig::with_seed(seed), seed, membership_mode: MembershipMode::Fcm }
    }

    pub fn with_mode(mut self, mode: MembershipMode) -> Self {
        self.membership_mode = mode;
        self
    }

    fn validate(&self) -> Result<()> {
        WeightParams::new(self.k_b)?;
        if let MembershipMode::Constant(v) = self.membership_mode {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::param(format!("constant membership must lie in (0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    #[serde(rename = "robot")]
    pub robot_id: usize,
    pub nodes: Vec<usize>,
    pub cost: f64,
    #[serde(skip)]
    pub per_leg: Vec<f64>,
}

impl Route {
    /// Task ids visited, in order.
    pub fn interior(&self) -> &[usize] {
        if self.nodes.len() < 2 {
            &[]
        } else {
            &self.nodes[1..self.nodes.len() - 1]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub routes: Vec<Route>,
    pub overall_cost: f64,
    pub agent_cost_stddev: f64,
}

impl Plan {
    pub fn from_routes(routes: Vec<Route>) -> Self {
        let costs: Vec<f64> = routes.iter().map(|r| r.cost).collect();
        let overall_cost = costs.iter().sum();
        let agent_cost_stddev = agent_cost_stddev(&costs).unwrap_or(0.0);
        Self { routes, overall_cost, agent_cost_stddev }
    }

    /// Builds routes (with leg costs) from closed node sequences.
    pub fn from_tours(tours: &[Vec<usize>], costs: &CostMatrix) -> Self {
        let routes = tours
            .iter()
            .enumerate()
            .map(|(k, nodes)| {
                let per_leg: Vec<f64> = nodes.windows(2).map(|w| costs.get(w[0], w[1])).collect();
                Route { robot_id: k + 1, nodes: nodes.clone(), cost: per_leg.iter().sum(), per_leg }
            })
            .collect();
        Self::from_routes(routes)
    }

    pub fn agent_costs(&self) -> Vec<f64> {
        self.routes.iter().map(|r| r.cost).collect()
    }

    pub fn tours(&self) -> Vec<Vec<usize>> {
        self.routes.iter().map(|r| r.nodes.clone()).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse("<plan>", e.to_string()))
    }
}

/// One round of the loop, as observed after its decisions were applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub depot_enabled: bool,
    /// Active robot vertices in the bigraph (every robot in round 0).
    pub robot_vertices: usize,
    /// Task-side vertices, depot included when enabled.
    pub task_vertices: usize,
    pub edges: usize,
    pub matching: Matching,
    pub remaining_tasks: usize,
    pub states: Vec<RobotState>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AllocationTrace {
    pub records: Vec<IterationRecord>,
}

impl AllocationTrace {
    /// Number of rounds, round 0 included.
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for record in &self.records {
            serde_json::to_writer(&mut out, record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Shared, round-independent inputs of a decision.
#[derive(Debug, Clone, Copy)]
pub struct DecisionContext<'a> {
    pub costs: &'a CostMatrix,
    pub task_cap: usize,
    pub weights: WeightParams,
}

/// The decision every robot computes for round `iteration` (1-based; round 0
/// is the random draw). A pure function of its arguments.
pub fn decision_step(
    states: &[RobotState],
    remaining: &[usize],
    memberships: &Memberships<'_>,
    ctx: &DecisionContext<'_>,
    iteration: usize,
) -> Result<Matching> {
    round(states, remaining, memberships, ctx, iteration).map(|(m, _)| m)
}

fn round(
    states: &[RobotState],
    remaining: &[usize],
    memberships: &Memberships<'_>,
    ctx: &DecisionContext<'_>,
    iteration: usize,
) -> Result<(Matching, (usize, usize, usize))> {
    let params = BigraphParams {
        weights: ctx.weights,
        task_cap: ctx.task_cap,
        depot_enabled: iteration >= DEPOT_OPENS_AT,
    };
    let g = build_bigraph(states, remaining, memberships, ctx.costs, &params)?;
    let shape = (g.robot_vertices.len(), g.task_vertices.len(), g.edges.len());
    Ok((max_weight_max_cardinality_matching(&g), shape))
}

struct Mission<'a> {
    costs: &'a CostMatrix,
    states: Vec<RobotState>,
    routes: Vec<Vec<usize>>,
    legs: Vec<Vec<f64>>,
    remaining: BTreeSet<usize>,
}

impl Mission<'_> {
    /// Index of a robot id; ids are `1..=m`.
    fn slot(robot_id: usize) -> usize {
        robot_id - 1
    }

    fn travel(&mut self, robot_id: usize, node: usize) {
        let k = Self::slot(robot_id);
        let state = &mut self.states[k];
        let leg = self.costs.get(state.current_node, node);
        state.cumulative_cost += leg;
        state.current_node = node;
        if node == DEPOT {
            state.finished = true;
        } else {
            state.tasks_done += 1;
            self.remaining.remove(&node);
        }
        self.routes[k].push(node);
        self.legs[k].push(leg);
    }
}

pub fn allocate(scenario: &Scenario, params: &DecMataParams) -> Result<(Plan, AllocationTrace)> {
    let m = scenario.robot_count;
    let n = scenario.task_count();
    if m == 0 || scenario.task_cap * m < n {
        return Err(Error::param(format!(
            "cap {} x {m} robots cannot cover {n} tasks",
            scenario.task_cap
        )));
    }
    scenario.validate()?;
    params.validate()?;

    let costs = scenario.cost_matrix();
    let clusters: Option<MembershipMatrix> = match params.membership_mode {
        MembershipMode::Fcm => Some(fcm_cluster(&scenario.task_locations(), m, &params.fcm)?),
        MembershipMode::Constant(_) => None,
    };
    let memberships = match (&clusters, params.membership_mode) {
        (Some(mm), _) => Memberships::Fuzzy(mm),
        (None, MembershipMode::Constant(v)) => Memberships::Constant(v),
        (None, MembershipMode::Fcm) => unreachable!("clusters are computed in fcm mode"),
    };
    let ctx = DecisionContext { costs: &costs, task_cap: scenario.task_cap, weights: WeightParams::new(params.k_b)? };

    let mut mission = Mission {
        costs: &costs,
        states: (1..=m).map(RobotState::at_depot).collect(),
        routes: vec![vec![DEPOT]; m],
        legs: vec![Vec::new(); m],
        remaining: scenario.task_ids().collect(),
    };
    let mut trace = AllocationTrace::default();

    // Round 0: m distinct tasks drawn uniformly, handed out in robot-id order.
    let mut rng = rng::stream(params.seed, rng::Stream::InitialAssignment);
    let picks = index::sample(&mut rng, n, m);
    let mut pairs = Vec::with_capacity(m);
    for (k, pick) in picks.iter().enumerate() {
        let robot_id = k + 1;
        let task = scenario.tasks[pick].id;
        mission.travel(robot_id, task);
        pairs.push((robot_id, task));
    }
    trace.records.push(IterationRecord {
        iteration: 0,
        depot_enabled: false,
        robot_vertices: m,
        task_vertices: n,
        edges: m * n,
        matching: Matching { pairs, total_weight: 0.0 },
        remaining_tasks: mission.remaining.len(),
        states: mission.states.clone(),
    });

    let mut iteration = 1;
    while !mission.remaining.is_empty() {
        let remaining: Vec<usize> = mission.remaining.iter().copied().collect();
        let (matching, (robots, nodes, edges)) = round(&mission.states, &remaining, &memberships, &ctx, iteration)?;
        if matching.is_empty() {
            return Err(Error::State(format!(
                "round {iteration}: no robot can act with {} tasks left",
                remaining.len()
            )));
        }
        for &(robot_id, node) in &matching.pairs {
            mission.travel(robot_id, node);
        }
        trace.records.push(IterationRecord {
            iteration,
            depot_enabled: iteration >= DEPOT_OPENS_AT,
            robot_vertices: robots,
            task_vertices: nodes,
            edges,
            matching,
            remaining_tasks: mission.remaining.len(),
            states: mission.states.clone(),
        });
        iteration += 1;
    }

    for robot_id in 1..=m {
        if !mission.states[Mission::slot(robot_id)].finished {
            mission.travel(robot_id, DEPOT);
        }
    }

    let routes = mission
        .routes
        .into_iter()
        .zip(mission.legs)
        .enumerate()
        .map(|(k, (nodes, per_leg))| Route { robot_id: k + 1, nodes, cost: per_leg.iter().sum(), per_leg })
        .collect();
    Ok((Plan::from_routes(routes), trace))
}

/// A broken plan invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    RouteCount { expected: usize, found: usize },
    DuplicateRobot { robot: usize },
    BadEndpoints { robot: usize },
    DepotInInterior { robot: usize },
    UnknownNode { robot: usize, node: usize },
    TaskRepeated { task: usize, visits: usize },
    TaskMissing { task: usize },
    CapExceeded { robot: usize, tasks: usize, cap: usize },
    IdleRobot { robot: usize },
    RouteCost { robot: usize, reported: f64, recomputed: f64 },
    OverallCost { reported: f64, recomputed: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RouteCount { expected, found } => write!(f, "expected {expected} routes, found {found}"),
            Violation::DuplicateRobot { robot } => write!(f, "robot {robot} has more than one route"),
            Violation::BadEndpoints { robot } => write!(f, "route of robot {robot} does not start and end at the depot"),
            Violation::DepotInInterior { robot } => write!(f, "route of robot {robot} passes the depot mid-route"),
            Violation::UnknownNode { robot, node } => write!(f, "route of robot {robot} visits unknown node {node}"),
            Violation::TaskRepeated { task, visits } => write!(f, "task {task} visited {visits} times"),
            Violation::TaskMissing { task } => write!(f, "task {task} is never visited"),
            Violation::CapExceeded { robot, tasks, cap } => {
                write!(f, "robot {robot} performs {tasks} tasks, cap is {cap}")
            }
            Violation::IdleRobot { robot } => write!(f, "robot {robot} performs no task"),
            Violation::RouteCost { robot, reported, recomputed } => {
                write!(f, "robot {robot} reports cost {reported}, route costs {recomputed}")
            }
            Violation::OverallCost { reported, recomputed } => {
                write!(f, "overall cost {reported} differs from route total {recomputed}")
            }
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Lists every invariant the plan breaks: task partition, cap, depot
/// endpoints, at least one task per robot and cost consistency.
pub fn verify_plan(scenario: &Scenario, plan: &Plan) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = scenario.task_count();
    let m = scenario.robot_count;
    let costs = scenario.cost_matrix();

    if plan.routes.len() != m {
        out.push(Violation::RouteCount { expected: m, found: plan.routes.len() });
    }
    let mut robots_seen = BTreeSet::new();
    let mut visits = vec![0usize; n + 1];
    let mut total = 0.0;
    for route in &plan.routes {
        let robot = route.robot_id;
        if !robots_seen.insert(robot) {
            out.push(Violation::DuplicateRobot { robot });
        }
        let nodes = &route.nodes;
        if nodes.len() < 2 || nodes[0] != DEPOT || nodes[nodes.len() - 1] != DEPOT {
            out.push(Violation::BadEndpoints { robot });
        }
        let interior = route.interior();
        for &node in interior {
            if node == DEPOT {
                out.push(Violation::DepotInInterior { robot });
            } else if node > n {
                out.push(Violation::UnknownNode { robot, node });
            } else {
                visits[node] += 1;
            }
        }
        let tasks = interior.iter().filter(|&&t| t != DEPOT).count();
        if tasks > scenario.task_cap {
            out.push(Violation::CapExceeded { robot, tasks, cap: scenario.task_cap });
        }
        if tasks == 0 && n >= m {
            out.push(Violation::IdleRobot { robot });
        }
        if nodes.iter().all(|&v| v <= n) {
            let recomputed = costs.path_cost(nodes);
            if !close(route.cost, recomputed) {
                out.push(Violation::RouteCost { robot, reported: route.cost, recomputed });
            }
        }
        total += route.cost;
    }
    for (task, &count) in visits.iter().enumerate().skip(1) {
        match count {
            0 => out.push(Violation::TaskMissing { task }),
            1 => {}
            visits => out.push(Violation::TaskRepeated { task, visits }),
        }
    }
    if !close(plan.overall_cost, total) {
        out.push(Violation::OverallCost { reported: plan.overall_cost, recomputed: total });
    }
    out
}
