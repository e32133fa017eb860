//! The mission world: a single depot, a set of located tasks, a robot team
//! and a per-robot task cap.
//!
//! Node indices are shared by every module: node `0` is the depot and node
//! `k >= 1` is the task with id `k`. Task ids are always `1..=n`.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::rng;

/// Node index of the depot.
pub const DEPOT: usize = 0;

/// Side length of the square arena used by the benchmark cases.
pub const DEFAULT_EXTENT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point2D {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2D> for [f64; 2] {
    fn from(p: Point2D) -> Self {
        [p.x, p.y]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: usize,
    #[serde(rename = "loc")]
    pub location: Point2D,
}

/// A complete allocation problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub seed: u64,
    pub extent: f64,
    pub depot: Point2D,
    #[serde(rename = "robots")]
    pub robot_count: usize,
    pub task_cap: usize,
    pub tasks: Vec<Task>,
}

/// Per-robot task cap used by the benchmark cases: `round(n / m) + 2`,
/// rounding half away from zero.
pub fn max_tasks_per_robot(n: usize, m: usize) -> usize {
    let m = m.max(1);
    (n as f64 / m as f64).round() as usize + 2
}

/// Draws the depot and `n` tasks uniformly over `[0, extent]^2`.
pub fn generate_scenario(seed: u64, m: usize, n: usize, extent: f64) -> Result<Scenario> {
    if m == 0 {
        return Err(Error::param("robot count must be at least 1"));
    }
    if n < m {
        return Err(Error::param(format!("task count {n} is smaller than robot count {m}")));
    }
    if !(extent.is_finite() && extent > 0.0) {
        return Err(Error::param(format!("extent must be positive and finite, got {extent}")));
    }
    let mut rng = rng::stream(seed, rng::Stream::Scenario);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
        Point2D::new(rng.gen_range(0.0..=extent), rng.gen_range(0.0..=extent))
    };
    let depot = draw(&mut rng);
    let tasks = (1..=n).map(|id| Task { id, location: draw(&mut rng) }).collect();
    Ok(Scenario { seed, extent, depot, robot_count: m, task_cap: max_tasks_per_robot(n, m), tasks })
}

impl Scenario {
    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    /// Location of a node (0 = depot, k = task k).
    pub fn node_location(&self, node: usize) -> Option<Point2D> {
        if node == DEPOT {
            Some(self.depot)
        } else {
            self.tasks.get(node - 1).map(|t| t.location)
        }
    }

    pub fn task_locations(&self) -> Vec<Point2D> {
        self.tasks.iter().map(|t| t.location).collect()
    }

    pub fn task_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.tasks.iter().map(|t| t.id)
    }

    pub fn cost_matrix(&self) -> CostMatrix {
        let mut points = Vec::with_capacity(self.tasks.len() + 1);
        points.push(self.depot);
        points.extend(self.tasks.iter().map(|t| t.location));
        CostMatrix::euclidean(&points)
    }

    /// Checks every structural invariant. Errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        if !(self.extent.is_finite() && self.extent > 0.0) {
            return Err(Error::parse("extent", "must be positive and finite"));
        }
        if !self.depot.is_finite() {
            return Err(Error::parse("depot", "coordinates must be finite"));
        }
        if self.robot_count == 0 {
            return Err(Error::parse("robots", "must be at least 1"));
        }
        if self.task_cap == 0 {
            return Err(Error::parse("task_cap", "must be at least 1"));
        }
        for (k, task) in self.tasks.iter().enumerate() {
            if task.id != k + 1 {
                return Err(Error::parse(
                    format!("tasks[{k}].id"),
                    format!("expected id {}, found {}; ids must be 1..n in order", k + 1, task.id),
                ));
            }
            if !task.location.is_finite() {
                return Err(Error::parse(format!("tasks[{k}].loc"), "coordinates must be finite"));
            }
        }
        let n = self.tasks.len();
        if n < self.robot_count {
            return Err(Error::parse(
                "tasks",
                format!("{n} tasks for {} robots; need at least one task per robot", self.robot_count),
            ));
        }
        if self.task_cap * self.robot_count < n {
            return Err(Error::parse(
                "task_cap",
                format!("cap {} x {} robots cannot cover {n} tasks", self.task_cap, self.robot_count),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Scenario> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::parse("<document>", e.to_string()))?;
        let obj = value.as_object().ok_or_else(|| Error::parse("<document>", "expected a JSON object"))?;
        let scenario = Scenario {
            seed: get_u64(obj, "seed")?,
            extent: get_f64(obj, "extent")?,
            depot: get_point(obj, "depot")?,
            robot_count: get_u64(obj, "robots")? as usize,
            task_cap: get_u64(obj, "task_cap")? as usize,
            tasks: get_tasks(obj)?,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, scenario.to_json()? + "\n")?;
    Ok(())
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    Scenario::from_json(&fs::read_to_string(path)?)
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| Error::parse(name, "missing"))
}

fn get_u64(obj: &Map<String, Value>, name: &str) -> Result<u64> {
    field(obj, name)?.as_u64().ok_or_else(|| Error::parse(name, "expected a non-negative integer"))
}

fn get_f64(obj: &Map<String, Value>, name: &str) -> Result<f64> {
    field(obj, name)?.as_f64().ok_or_else(|| Error::parse(name, "expected a number"))
}

fn as_point(value: &Value, name: &str) -> Result<Point2D> {
    match value.as_array().map(Vec::as_slice) {
        Some([x, y]) => match (x.as_f64(), y.as_f64()) {
            (Some(x), Some(y)) => Ok(Point2D::new(x, y)),
            _ => Err(Error::parse(name, "coordinates must be numbers")),
        },
        _ => Err(Error::parse(name, "expected [x, y]")),
    }
}

fn get_point(obj: &Map<String, Value>, name: &str) -> Result<Point2D> {
    as_point(field(obj, name)?, name)
}

fn get_tasks(obj: &Map<String, Value>) -> Result<Vec<Task>> {
    let list = field(obj, "tasks")?.as_array().ok_or_else(|| Error::parse("tasks", "expected an array"))?;
    list.iter()
        .enumerate()
        .map(|(k, entry)| {
            let name = format!("tasks[{k}]");
            let entry = entry.as_object().ok_or_else(|| Error::parse(&name, "expected an object"))?;
            let id = entry
                .get("id")
                .ok_or_else(|| Error::parse(format!("{name}.id"), "missing"))?
                .as_u64()
                .ok_or_else(|| Error::parse(format!("{name}.id"), "expected a non-negative integer"))?;
            let loc_name = format!("{name}.loc");
            let loc = entry.get("loc").ok_or_else(|| Error::parse(&loc_name, "missing"))?;
            Ok(Task { id: id as usize, location: as_point(loc, &loc_name)? })
        })
        .collect()
}

/// Symmetric travel costs between nodes; index 0 is the depot.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    size: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    /// Pairwise Euclidean distances. Each unordered pair is computed once and
    /// mirrored so the matrix is exactly symmetric.
    pub fn euclidean(points: &[Point2D]) -> Self {
        let size = points.len();
        let mut data = vec![0.0; size * size];
        for i in 0..size {
            for j in (i + 1)..size {
                let d = points[i].distance(&points[j]);
                data[i * size + j] = d;
                data[j * size + i] = d;
            }
        }
        Self { size, data }
    }

    /// Builds a matrix from explicit rows. Used by tests and by callers with
    /// non-geometric costs.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        let mut data = Vec::with_capacity(size * size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::param(format!("row {i} has {} entries, expected {size}", row.len())));
            }
            if row.iter().any(|c| !c.is_finite() || *c < 0.0) {
                return Err(Error::param(format!("row {i} contains a negative or non-finite cost")));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { size, data })
    }

    /// Number of nodes, depot included.
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.data[from * self.size + to]
    }

    /// Total cost of walking `nodes` in order.
    pub fn path_cost(&self, nodes: &[usize]) -> f64 {
        nodes.windows(2).map(|w| self.get(w[0], w[1])).sum()
    }
}

/// Shared, fully observed state of one robot during allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub robot_id: usize,
    pub current_node: usize,
    pub cumulative_cost: f64,
    pub tasks_done: usize,
    pub finished: bool,
}

impl RobotState {
    pub fn at_depot(robot_id: usize) -> Self {
        Self { robot_id, current_node: DEPOT, cumulative_cost: 0.0, tasks_done: 0, finished: false }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_matches_case_table() {
        let table = [(10, 2, 7), (12, 4, 5), (24, 8, 5), (20, 10, 4), (60, 20, 5), (80, 4, 22), (100, 50, 4)];
        for (n, m, h) in table {
            assert_eq!(max_tasks_per_robot(n, m), h, "n={n} m={m}");
        }
    }

    #[test]
    fn cap_rounds_half_away_from_zero() {
        assert_eq!(max_tasks_per_robot(5, 2), 5); // 2.5 -> 3
        assert_eq!(max_tasks_per_robot(7, 2), 6); // 3.5 -> 4
        assert_eq!(max_tasks_per_robot(4, 3), 3); // 1.33 -> 1
    }

    #[test]
    fn generated_sizes_and_cap() {
        let s = generate_scenario(7, 2, 10, 10.0).unwrap();
        assert_eq!(s.task_count(), 10);
        assert_eq!(s.task_cap, 7);
        assert_eq!(generate_scenario(7, 4, 12, 10.0).unwrap().task_cap, 5);
        s.validate().unwrap();
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_scenario(99, 3, 9, 10.0).unwrap();
        let b = generate_scenario(99, 3, 9, 10.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_ne!(a, generate_scenario(100, 3, 9, 10.0).unwrap());
    }

    #[test]
    fn generation_rejects_bad_sizes() {
        assert!(matches!(generate_scenario(1, 0, 3, 10.0), Err(Error::Parameter(_))));
        assert!(matches!(generate_scenario(1, 4, 3, 10.0), Err(Error::Parameter(_))));
        assert!(matches!(generate_scenario(1, 1, 3, 0.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn three_four_five() {
        let s = Scenario {
            seed: 0,
            extent: 10.0,
            depot: Point2D::new(0.0, 0.0),
            robot_count: 1,
            task_cap: 3,
            tasks: vec![Task { id: 1, location: Point2D::new(3.0, 4.0) }],
        };
        let c = s.cost_matrix();
        assert_eq!(c.get(0, 1), 5.0);
        assert_eq!(c.get(1, 0), 5.0);
        assert_eq!(c.get(0, 0), 0.0);
        assert_eq!(c.get(1, 1), 0.0);
        assert_eq!(c.path_cost(&[0, 1, 0]), 10.0);
    }

    #[test]
    fn minimal_hand_written_json() {
        let text = r#"{"seed": 1, "extent": 10.0, "depot": [0, 0], "robots": 1, "task_cap": 1,
                       "tasks": [{"id": 1, "loc": [3.0, 4.0]}]}"#;
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(s.task_count(), 1);
        assert_eq!(s.tasks[0].location, Point2D::new(3.0, 4.0));
    }

    #[test]
    fn parse_errors_name_the_field() {
        let missing = r#"{"seed": 1, "extent": 10.0, "robots": 1, "task_cap": 1, "tasks": []}"#;
        match Scenario::from_json(missing) {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "depot"),
            other => panic!("unexpected {other:?}"),
        }
        let bad_loc = r#"{"seed": 1, "extent": 10.0, "depot": [0, 0], "robots": 1, "task_cap": 1,
                          "tasks": [{"id": 1, "loc": [3.0]}]}"#;
        match Scenario::from_json(bad_loc) {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "tasks[0].loc"),
            other => panic!("unexpected {other:?}"),
        }
        let gap = r#"{"seed": 1, "extent": 10.0, "depot": [0, 0], "robots": 1, "task_cap": 2,
                      "tasks": [{"id": 2, "loc": [3.0, 1.0]}]}"#;
        match Scenario::from_json(gap) {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "tasks[0].id"),
            other => panic!("unexpected {other:?}"),
        }
        let infeasible = r#"{"seed": 1, "extent": 10.0, "depot": [0, 0], "robots": 1, "task_cap": 1,
                             "tasks": [{"id": 1, "loc": [3.0, 1.0]}, {"id": 2, "loc": [1.0, 1.0]}]}"#;
        match Scenario::from_json(infeasible) {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "task_cap"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        let s = generate_scenario(3, 2, 6, 10.0).unwrap();
        save_scenario(&s, &path).unwrap();
        assert_eq!(load_scenario(&path).unwrap(), s);
    }
}
