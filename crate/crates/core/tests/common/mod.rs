//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use decmata::{Bigraph, CostMatrix, Edge, Point2D};
use rand::Rng;

/// Cheapest closed walk `0 -> tasks in some order -> 0`, by trying every
/// permutation of `tasks`.
pub fn best_tour(costs: &CostMatrix, tasks: &[usize]) -> f64 {
    fn go(costs: &CostMatrix, here: usize, left: &mut Vec<usize>, acc: f64, best: &mut f64) {
        if left.is_empty() {
            *best = best.min(acc + costs.get(here, 0));
            return;
        }
        for k in 0..left.len() {
            let next = left.remove(k);
            go(costs, next, left, acc + costs.get(here, next), best);
            left.insert(k, next);
        }
    }
    let mut best = f64::INFINITY;
    go(costs, 0, &mut tasks.to_vec(), 0.0, &mut best);
    best
}

/// Minimum total cost over every split of tasks `1..=n` into exactly `m`
/// non-empty groups of at most `h` tasks, each group served by its best tour.
pub fn partition_permutation_optimum(costs: &CostMatrix, n: usize, m: usize, h: usize) -> f64 {
    let mut memo: HashMap<u32, f64> = HashMap::new();
    let mut labels = vec![0usize; n];
    let mut best = f64::INFINITY;

    // Restricted growth strings: task k joins an existing group or opens the next one.
    fn rec(
        k: usize,
        groups: usize,
        labels: &mut [usize],
        costs: &CostMatrix,
        m: usize,
        h: usize,
        memo: &mut HashMap<u32, f64>,
        best: &mut f64,
    ) {
        let n = labels.len();
        if groups + (n - k) < m {
            return;
        }
        if k == n {
            if groups != m {
                return;
            }
            let mut total = 0.0;
            for g in 0..m {
                let mask: u32 = (0..n).filter(|&t| labels[t] == g).fold(0, |acc, t| acc | (1 << t));
                if mask.count_ones() as usize > h {
                    return;
                }
                total += *memo.entry(mask).or_insert_with(|| {
                    let tasks: Vec<usize> = (0..n).filter(|&t| mask & (1 << t) != 0).map(|t| t + 1).collect();
                    best_tour(costs, &tasks)
                });
            }
            *best = best.min(total);
            return;
        }
        for g in 0..=groups.min(m - 1) {
            labels[k] = g;
            let opened = if g == groups { groups + 1 } else { groups };
            rec(k + 1, opened, labels, costs, m, h, memo, best);
        }
    }

    rec(0, 0, &mut labels, costs, m, h, &mut memo, &mut best);
    best
}

/// Random bipartite graph with up to `max_side` vertices per side.
pub fn random_bigraph<R: Rng>(rng: &mut R, max_side: usize, integer_weights: bool) -> Bigraph {
    let robots: Vec<usize> = (1..=rng.gen_range(1..=max_side)).collect();
    let nodes: Vec<usize> = (1..=rng.gen_range(1..=max_side)).collect();
    let density: f64 = rng.gen_range(0.3..=1.0);
    let mut edges = Vec::new();
    for &r in &robots {
        for &t in &nodes {
            if rng.gen_bool(density) {
                let weight = if integer_weights { rng.gen_range(0..=1000) as f64 } else { rng.gen_range(0.0..=1000.0) };
                edges.push(Edge { robot: r, node: t, weight });
            }
        }
    }
    Bigraph::new(robots, nodes, edges).expect("well-formed graph")
}

/// Textbook fuzzy c-means membership of every point (columns) in every
/// cluster (rows), written directly from the ratio-of-distances formula.
pub fn fcm_memberships(points: &[Point2D], centers: &[Point2D], gamma: f64) -> Vec<Vec<f64>> {
    let p = 2.0 / (gamma - 1.0);
    let mut u = vec![vec![0.0; points.len()]; centers.len()];
    for (j, x) in points.iter().enumerate() {
        let d: Vec<f64> = centers.iter().map(|c| ((x.x - c.x).powi(2) + (x.y - c.y).powi(2)).sqrt()).collect();
        if let Some(hit) = d.iter().position(|&di| di == 0.0) {
            u[hit][j] = 1.0;
            continue;
        }
        for i in 0..centers.len() {
            u[i][j] = 1.0 / d.iter().map(|dk| (d[i] / dk).powf(p)).sum::<f64>();
        }
    }
    u
}

/// Membership-weighted means `sum u^gamma x / sum u^gamma`.
pub fn fcm_centers(points: &[Point2D], u: &[Vec<f64>], gamma: f64) -> Vec<Point2D> {
    u.iter()
        .map(|row| {
            let w: Vec<f64> = row.iter().map(|b| b.powf(gamma)).collect();
            let total: f64 = w.iter().sum();
            let x = points.iter().zip(&w).map(|(p, w)| p.x * w).sum::<f64>() / total;
            let y = points.iter().zip(&w).map(|(p, w)| p.y * w).sum::<f64>() / total;
            Point2D::new(x, y)
        })
        .collect()
}

pub fn population_stddev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}
