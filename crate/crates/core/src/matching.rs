//! Exact maximum-weight matching on robot/task bigraphs.
//!
//! The graph is bipartite, so no odd cycles (blossoms) can form and the
//! problem is a rectangular assignment problem. It is solved with the
//! shortest-augmenting-path Hungarian method, padding every robot with
//! "stay unmatched" columns so partial matchings are representable.
//!
//! Costs are lexicographic pairs `(unmatched robots, -weight)`, which lets
//! one solver serve both objectives: plain maximum weight (the first
//! component is always zero) and maximum weight among matchings that match
//! as many robots as possible.
//!
//! Among optimal matchings the one whose sorted `(robot, node)` list is
//! lexicographically smallest is returned. The optimal dual potentials
//! restrict the candidates to tight edges, so ties cost extra solves only
//! when they actually exist.

use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::bigraph::Bigraph;
use crate::error::{Error, Result};

/// Vertex budget (`robots + nodes`) of the exhaustive oracle.
pub const BRUTE_FORCE_MAX_VERTICES: usize = 16;

/// Optimal totals closer than `TIE_REL * scale` count as equal.
const TIE_REL: f64 = 1e-13;
/// Looser bound used only to shortlist tight edges; each shortlisted edge is
/// re-verified by an exact solve.
const TIGHT_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Matching {
    /// `(robot_id, node_id)`, sorted.
    pub pairs: Vec<(usize, usize)>,
    pub total_weight: f64,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn node_of(&self, robot: usize) -> Option<usize> {
        self.pairs.iter().find(|(r, _)| *r == robot).map(|&(_, n)| n)
    }

    /// Checks that no vertex is shared and every pair is an edge of `g`.
    pub fn is_valid_for(&self, g: &Bigraph) -> bool {
        let mut robots: Vec<_> = self.pairs.iter().map(|p| p.0).collect();
        let mut nodes: Vec<_> = self.pairs.iter().map(|p| p.1).collect();
        robots.sort_unstable();
        nodes.sort_unstable();
        robots.windows(2).all(|w| w[0] != w[1])
            && nodes.windows(2).all(|w| w[0] != w[1])
            && self.pairs.iter().all(|&(r, n)| g.weight(r, n).is_some())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    /// Maximize total weight over all matchings.
    MaxWeight,
    /// Match as many robots as possible, then maximize weight.
    MaxCardinalityThenWeight,
}

pub fn max_weight_matching(g: &Bigraph) -> Matching {
    solve(g, Objective::MaxWeight)
}

/// The allocation loop's decision rule: every robot that has an edge left
/// acts, and among such matchings the heaviest wins.
pub fn max_weight_max_cardinality_matching(g: &Bigraph) -> Matching {
    solve(g, Objective::MaxCardinalityThenWeight)
}

pub fn max_weight_matching_bruteforce(g: &Bigraph) -> Result<Matching> {
    bruteforce(g, Objective::MaxWeight)
}

pub fn max_weight_max_cardinality_matching_bruteforce(g: &Bigraph) -> Result<Matching> {
    bruteforce(g, Objective::MaxCardinalityThenWeight)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Cost {
    unmatched: i64,
    neg_weight: f64,
}

impl Cost {
    const ZERO: Cost = Cost { unmatched: 0, neg_weight: 0.0 };

    fn cmp_lex(&self, other: &Cost) -> Ordering {
        self.unmatched.cmp(&other.unmatched).then(self.neg_weight.total_cmp(&other.neg_weight))
    }

    fn lt(&self, other: &Cost) -> bool {
        self.cmp_lex(other) == Ordering::Less
    }

    fn ties(&self, other: &Cost, eps: f64) -> bool {
        self.unmatched == other.unmatched && (self.neg_weight - other.neg_weight).abs() <= eps
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, o: Cost) -> Cost {
        Cost { unmatched: self.unmatched + o.unmatched, neg_weight: self.neg_weight + o.neg_weight }
    }
}

impl Sub for Cost {
    type Output = Cost;
    fn sub(self, o: Cost) -> Cost {
        Cost { unmatched: self.unmatched - o.unmatched, neg_weight: self.neg_weight - o.neg_weight }
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, o: Cost) {
        *self = *self + o;
    }
}

impl SubAssign for Cost {
    fn sub_assign(&mut self, o: Cost) {
        *self = *self - o;
    }
}

/// Dense view of a bigraph with robots and nodes sorted by id.
struct Dense {
    robots: Vec<usize>,
    nodes: Vec<usize>,
    /// `weights[r][t]`, `None` where there is no edge.
    weights: Vec<Vec<Option<f64>>>,
    objective: Objective,
}

impl Dense {
    fn new(g: &Bigraph, objective: Objective) -> Self {
        let mut robots = g.robot_vertices.clone();
        let mut nodes = g.task_vertices.clone();
        robots.sort_unstable();
        nodes.sort_unstable();
        let mut weights = vec![vec![None; nodes.len()]; robots.len()];
        for e in &g.edges {
            // Bigraph construction guarantees both endpoints are present.
            let r = robots.binary_search(&e.robot).expect("edge robot is a vertex");
            let t = nodes.binary_search(&e.node).expect("edge node is a vertex");
            weights[r][t] = Some(e.weight);
        }
        Self { robots, nodes, weights, objective }
    }

    fn edge_cost(&self, r: usize, t: usize) -> Option<Cost> {
        self.weights[r][t].map(|w| Cost { unmatched: 0, neg_weight: -w })
    }

    fn unmatched_cost(&self) -> Cost {
        match self.objective {
            Objective::MaxWeight => Cost::ZERO,
            Objective::MaxCardinalityThenWeight => Cost { unmatched: 1, neg_weight: 0.0 },
        }
    }

    /// Upper bound on any matching's total weight, used to scale tolerances.
    fn scale(&self) -> f64 {
        let total: f64 = self
            .weights
            .iter()
            .map(|row| row.iter().flatten().fold(0.0_f64, |a, &b| a.max(b)))
            .sum();
        total.max(1.0)
    }

    /// Optimal assignment of `rows` into `cols` plus one "unmatched" column
    /// per row.
    fn assign(&self, rows: &[usize], cols: &[usize]) -> Assignment {
        let n = rows.len();
        let m = cols.len() + n;
        let unmatched = self.unmatched_cost();
        let cost = |i: usize, j: usize| -> Option<Cost> {
            if j < cols.len() {
                self.edge_cost(rows[i], cols[j])
            } else {
                Some(unmatched)
            }
        };
        let solved = hungarian(n, m, cost);
        let matched = solved
            .row_to_col
            .iter()
            .map(|&j| if j < cols.len() { Some(cols[j]) } else { None })
            .collect();
        Assignment { matched, value: solved.value, row_dual: solved.row_dual, col_dual: solved.col_dual }
    }

    fn to_matching(&self, choice: &[Option<usize>]) -> Matching {
        let mut pairs = Vec::new();
        let mut total_weight = 0.0;
        for (r, t) in choice.iter().enumerate() {
            if let Some(t) = *t {
                pairs.push((self.robots[r], self.nodes[t]));
                total_weight += self.weights[r][t].expect("matched pair is an edge");
            }
        }
        Matching { pairs, total_weight }
    }
}

struct Assignment {
    /// Per row, the chosen dense node index (`None` = unmatched).
    matched: Vec<Option<usize>>,
    value: Cost,
    row_dual: Vec<Cost>,
    col_dual: Vec<Cost>,
}

struct Solved {
    row_to_col: Vec<usize>,
    value: Cost,
    row_dual: Vec<Cost>,
    col_dual: Vec<Cost>,
}

/// Shortest augmenting path Hungarian method for an `n x m` (`n <= m`)
/// minimum-cost assignment where `cost(i, j) == None` forbids a cell.
/// Every row must be able to reach some column; the caller guarantees this
/// through its padding columns.
fn hungarian(n: usize, m: usize, cost: impl Fn(usize, usize) -> Option<Cost>) -> Solved {
    debug_assert!(n <= m);
    // 1-based; index 0 is the virtual root column/row.
    let mut u = vec![Cost::ZERO; n + 1];
    let mut v = vec![Cost::ZERO; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv: Vec<Option<Cost>> = vec![None; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta: Option<Cost> = None;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                if let Some(c) = cost(i0 - 1, j - 1) {
                    let cur = c - u[i0] - v[j];
                    if minv[j].map_or(true, |mv| cur.lt(&mv)) {
                        minv[j] = Some(cur);
                        way[j] = j0;
                    }
                }
                if let Some(mv) = minv[j] {
                    if delta.map_or(true, |d| mv.lt(&d)) {
                        delta = Some(mv);
                        j1 = j;
                    }
                }
            }
            let delta = delta.expect("padding columns keep every row assignable");
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else if let Some(mv) = minv[j].as_mut() {
                    *mv -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0; n];
    for j in 1..=m {
        if owner[j] != 0 {
            row_to_col[owner[j] - 1] = j - 1;
        }
    }
    let mut value = Cost::ZERO;
    for (i, &j) in row_to_col.iter().enumerate() {
        value += cost(i, j).expect("assigned cell is allowed");
    }
    Solved { row_to_col, value, row_dual: u[1..].to_vec(), col_dual: v[1..].to_vec() }
}

fn solve(g: &Bigraph, objective: Objective) -> Matching {
    let dense = Dense::new(g, objective);
    let rows: Vec<usize> = (0..dense.robots.len()).collect();
    let cols: Vec<usize> = (0..dense.nodes.len()).collect();
    if rows.is_empty() {
        return Matching::default();
    }
    let full = dense.assign(&rows, &cols);
    let optimum = full.value;
    let scale = dense.scale();
    let tie_eps = TIE_REL * scale;
    let tight_eps = TIGHT_REL * scale;

    // Walk robots in id order, fixing each to the smallest option that still
    // admits an optimal completion. `current` always holds such a completion.
    let mut current = full.matched.clone();
    let mut fixed_cost = Cost::ZERO;
    let mut used = vec![false; dense.nodes.len()];
    let unmatched = dense.unmatched_cost();

    for r in 0..rows.len() {
        let remaining = (rows.len() - r) as i64;
        let all_idle = fixed_cost + Cost { unmatched: unmatched.unmatched * remaining, neg_weight: 0.0 };
        if all_idle.ties(&optimum, tie_eps) {
            for slot in current.iter_mut().skip(r) {
                *slot = None;
            }
            break;
        }

        let limit = current[r].unwrap_or(usize::MAX);
        let mut chosen = current[r];
        for t in 0..dense.nodes.len().min(limit) {
            if used[t] {
                continue;
            }
            let Some(c) = dense.edge_cost(r, t) else { continue };
            let reduced = c - full.row_dual[r] - full.col_dual[t];
            if reduced.unmatched != 0 || reduced.neg_weight > tight_eps {
                continue;
            }
            let rest_rows: Vec<usize> = ((r + 1)..rows.len()).collect();
            let rest_cols: Vec<usize> = (0..dense.nodes.len()).filter(|&k| !used[k] && k != t).collect();
            let rest = dense.assign(&rest_rows, &rest_cols);
            if (fixed_cost + c + rest.value).ties(&optimum, tie_eps) {
                chosen = Some(t);
                current[r] = Some(t);
                for (k, slot) in rest.matched.into_iter().enumerate() {
                    current[r + 1 + k] = slot;
                }
                break;
            }
        }

        match chosen {
            Some(t) => {
                used[t] = true;
                fixed_cost += dense.edge_cost(r, t).expect("chosen pair is an edge");
            }
            None => fixed_cost += unmatched,
        }
    }

    dense.to_matching(&current)
}

fn bruteforce(g: &Bigraph, objective: Objective) -> Result<Matching> {
    let vertices = g.robot_vertices.len() + g.task_vertices.len();
    if vertices > BRUTE_FORCE_MAX_VERTICES {
        return Err(Error::param(format!(
            "exhaustive matching supports at most {BRUTE_FORCE_MAX_VERTICES} vertices, got {vertices}"
        )));
    }
    let dense = Dense::new(g, objective);
    let tie_eps = TIE_REL * dense.scale();

    struct Search<'a> {
        dense: &'a Dense,
        tie_eps: f64,
        used: Vec<bool>,
        stack: Vec<Option<usize>>,
        best: Option<(Cost, Vec<(usize, usize)>, Vec<Option<usize>>)>,
    }

    impl Search<'_> {
        fn visit(&mut self, r: usize) {
            if r == self.dense.robots.len() {
                self.leaf();
                return;
            }
            self.stack.push(None);
            self.visit(r + 1);
            self.stack.pop();
            for t in 0..self.dense.nodes.len() {
                if self.used[t] || self.dense.weights[r][t].is_none() {
                    continue;
                }
                self.used[t] = true;
                self.stack.push(Some(t));
                self.visit(r + 1);
                self.stack.pop();
                self.used[t] = false;
            }
        }

        fn leaf(&mut self) {
            let mut cost = Cost::ZERO;
            let mut pairs = Vec::new();
            for (r, t) in self.stack.iter().enumerate() {
                match *t {
                    Some(t) => {
                        cost += self.dense.edge_cost(r, t).expect("enumerated pair is an edge");
                        pairs.push((self.dense.robots[r], self.dense.nodes[t]));
                    }
                    None => cost += self.dense.unmatched_cost(),
                }
            }
            let better = match &self.best {
                None => true,
                Some((best_cost, best_pairs, _)) => {
                    if cost.ties(best_cost, self.tie_eps) {
                        pairs < *best_pairs
                    } else {
                        cost.lt(best_cost)
                    }
                }
            };
            if better {
                self.best = Some((cost, pairs, self.stack.clone()));
            }
        }
    }

    let mut search = Search {
        dense: &dense,
        tie_eps,
        used: vec![false; dense.nodes.len()],
        stack: Vec::with_capacity(dense.robots.len()),
        best: None,
    };
    search.visit(0);
    let (_, _, choice) = search.best.expect("the empty matching is always enumerated");
    Ok(dense.to_matching(&choice))
}
