//! Depth-first branch and bound over tour construction.
//!
//! Tours are built one at a time; a new tour must start at a task with a
//! larger id than the previous tour's first task, which removes the `m!`
//! tour-order symmetry. Children are expanded nearest-first. The bound adds,
//! for every task not yet visited, its cheapest incoming edge, and for every
//! tour not yet closed, the cheapest edge into the depot.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::MilpModel;
use crate::error::{Error, Result};
use crate::scenario::{CostMatrix, DEPOT};

/// Largest task count the exact solver is considered in scope for.
pub const EXACT_MAX_TASKS: usize = 12;

/// Equal-cost tolerance between tour sets.
const COST_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSolution {
    /// Closed tours `[0, ..., 0]`, sorted by first task.
    pub tours: Vec<Vec<usize>>,
    pub objective: f64,
    pub proven_optimal: bool,
    pub nodes_explored: u64,
}

fn cheapest_incoming(costs: &CostMatrix) -> (Vec<f64>, f64) {
    let size = costs.size();
    let into = |j: usize| (0..size).filter(|&i| i != j).map(|i| costs.get(i, j)).fold(f64::INFINITY, f64::min);
    let tasks = (0..size).map(|j| if j == DEPOT { 0.0 } else { into(j) }).collect();
    let depot = (1..size).map(|i| costs.get(i, DEPOT)).fold(f64::INFINITY, f64::min);
    (tasks, depot)
}

/// Bound at the root of the search; never exceeds the optimum.
pub fn root_lower_bound(model: &MilpModel) -> f64 {
    let (tasks, depot) = cheapest_incoming(&model.costs);
    tasks.iter().sum::<f64>() + model.m as f64 * depot
}

struct Search<'a> {
    costs: &'a CostMatrix,
    n: usize,
    m: usize,
    h: usize,
    cheapest_in: Vec<f64>,
    depot_in: f64,
    visited: Vec<bool>,
    unvisited: usize,
    /// Sum of `cheapest_in` over unvisited tasks.
    bound_rest: f64,
    tours: Vec<Vec<usize>>,
    best: Option<(f64, Vec<Vec<usize>>)>,
    nodes: u64,
    deadline: Instant,
    timed_out: bool,
}

enum Step {
    Visit(usize),
    Close,
}

impl Search<'_> {
    fn offer(&mut self, cost: f64) {
        let better = match &self.best {
            None => true,
            Some((best, tours)) => {
                if (cost - best).abs() <= COST_EPS * best.abs().max(1.0) {
                    self.tours < *tours
                } else {
                    cost < *best
                }
            }
        };
        if better {
            self.best = Some((cost, self.tours.clone()));
        }
    }

    fn dfs(&mut self, so_far: f64) {
        self.nodes += 1;
        if self.nodes % 1024 == 0 && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }

        let open_tours = self.m - (self.tours.len() - 1);
        if let Some((best, _)) = &self.best {
            let bound = so_far + self.bound_rest + open_tours as f64 * self.depot_in;
            if bound > best + COST_EPS * best.abs().max(1.0) {
                return;
            }
        }

        let tour = self.tours.last().expect("search always has an open tour");
        let here = *tour.last().expect("tours start at the depot");
        let in_tour = tour.len() - 1;
        let later_tours = self.m - self.tours.len();

        if self.unvisited == 0 {
            if later_tours == 0 && in_tour > 0 {
                self.tours.last_mut().unwrap().push(DEPOT);
                self.offer(so_far + self.costs.get(here, DEPOT));
                self.tours.last_mut().unwrap().pop();
            }
            return;
        }

        let mut steps: Vec<(f64, usize, Step)> = Vec::new();
        // Closing requires a non-empty tour and room for the rest in the
        // tours still to come, each of which needs at least one task.
        if in_tour > 0 && later_tours > 0 && self.unvisited >= later_tours && self.unvisited <= later_tours * self.h {
            steps.push((self.costs.get(here, DEPOT), DEPOT, Step::Close));
        }
        if in_tour < self.h && self.unvisited > later_tours {
            let min_first = if in_tour == 0 && self.tours.len() > 1 { self.tours[self.tours.len() - 2][1] } else { 0 };
            let left_after = self.unvisited - 1;
            if left_after <= (self.h - in_tour - 1) + later_tours * self.h {
                for j in (min_first + 1)..=self.n {
                    if !self.visited[j] {
                        steps.push((self.costs.get(here, j), j, Step::Visit(j)));
                    }
                }
            }
        }
        steps.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        for (edge, _, step) in steps {
            match step {
                Step::Visit(j) => {
                    self.visited[j] = true;
                    self.unvisited -= 1;
                    self.bound_rest -= self.cheapest_in[j];
                    self.tours.last_mut().unwrap().push(j);
                    self.dfs(so_far + edge);
                    self.tours.last_mut().unwrap().pop();
                    self.bound_rest += self.cheapest_in[j];
                    self.unvisited += 1;
                    self.visited[j] = false;
                }
                Step::Close => {
                    self.tours.last_mut().unwrap().push(DEPOT);
                    self.tours.push(vec![DEPOT]);
                    self.dfs(so_far + edge);
                    self.tours.pop();
                    self.tours.last_mut().unwrap().pop();
                }
            }
            if self.timed_out {
                return;
            }
        }
    }
}

/// Minimum-cost tour set for the model's costs, robot count and cap.
///
/// Returns the proven optimum when the search completes within `budget`,
/// otherwise the best tour set found with `proven_optimal = false`.
pub fn solve_exact(model: &MilpModel, budget: Duration) -> Result<ExactSolution> {
    let n = model.task_count();
    let (cheapest_in, depot_in) = cheapest_incoming(&model.costs);
    let started = Instant::now();
    let mut search = Search {
        costs: &model.costs,
        n,
        m: model.m,
        h: model.h,
        bound_rest: cheapest_in.iter().sum(),
        cheapest_in,
        depot_in,
        visited: vec![false; n + 1],
        unvisited: n,
        tours: vec![vec![DEPOT]],
        best: None,
        nodes: 0,
        deadline: started + budget,
        timed_out: false,
    };
    search.dfs(0.0);
    let proven_optimal = !search.timed_out;
    let nodes_explored = search.nodes;
    match search.best {
        Some((objective, tours)) => Ok(ExactSolution { tours, objective, proven_optimal, nodes_explored }),
        None if search.timed_out => Err(Error::Timeout { budget_s: budget.as_secs_f64() }),
        None => Err(Error::State("no feasible tour set exists".into())),
    }
}
