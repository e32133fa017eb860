use decmata::bigraph::DEFAULT_K_B;
use decmata::fcm::{fcm_cluster, FcmConfig};
use decmata::scenario::DEPOT;
use decmata::{
    allocate, build_bigraph, edge_weight, generate_scenario, BigraphParams, DecMataParams, Memberships, RobotState,
    WeightParams,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn weight_falls_with_distance(b in 0.01f64..=1.0, cum in 0.0f64..100.0, c in 0.0f64..50.0, dc in 1e-6f64..10.0) {
        let near = edge_weight(b, cum, c, DEFAULT_K_B).unwrap();
        let far = edge_weight(b, cum, c + dc, DEFAULT_K_B).unwrap();
        prop_assert!(far < near);
    }

    #[test]
    fn weight_rises_with_cumulative_cost(b in 0.01f64..=1.0, cum in 0.0f64..100.0, c in 0.0f64..50.0, dcum in 1e-6f64..10.0) {
        let before = edge_weight(b, cum, c, DEFAULT_K_B).unwrap();
        let after = edge_weight(b, cum + dcum, c, DEFAULT_K_B).unwrap();
        prop_assert!(after > before);
    }

    #[test]
    fn weight_formula(b in 0.0f64..=1.0, cum in 0.0f64..100.0, c in 0.0f64..50.0, k in 1.0f64..5000.0) {
        let w = edge_weight(b, cum, c, k).unwrap();
        let expected = k * b * (cum + 1.0) / ((c + 1.0) * (c + 1.0));
        prop_assert!((w - expected).abs() <= 1e-12 * expected.max(1.0));
    }
}

#[test]
fn task_side_shrinks_by_m_per_round() {
    for seed in 0..50 {
        for (m, n) in [(4, 12), (2, 10), (8, 24), (4, 80)] {
            let s = generate_scenario(seed, m, n, 10.0).unwrap();
            let (_, trace) = allocate(&s, &DecMataParams::seeded(seed)).unwrap();
            for rec in &trace.records {
                let k = rec.iteration;
                if k == 0 || n < k * m + m {
                    continue;
                }
                // Rounds 0..k-1 each consumed m tasks while every robot stayed out.
                let all_active = trace.records[k - 1].states.iter().all(|st| !st.finished);
                if all_active {
                    let expected = n - k * m + usize::from(rec.depot_enabled);
                    assert_eq!(rec.task_vertices, expected, "seed {seed}, (m={m}, n={n}), round {k}");
                }
            }
        }
    }
}

#[test]
fn four_robot_twelve_task_rounds() {
    let s = generate_scenario(3, 4, 12, 10.0).unwrap();
    let (_, trace) = allocate(&s, &DecMataParams::seeded(3)).unwrap();
    let r1 = &trace.records[1];
    assert!(!r1.depot_enabled);
    assert_eq!((r1.robot_vertices, r1.task_vertices), (4, 8));
    assert_eq!(r1.matching.len(), 4);
    let r2 = &trace.records[2];
    assert!(r2.depot_enabled);
    assert_eq!(r2.task_vertices, 5);
}

#[test]
fn capped_robot_only_sees_the_depot() {
    let s = generate_scenario(1, 2, 6, 10.0).unwrap();
    let costs = s.cost_matrix();
    let mm = fcm_cluster(&s.task_locations(), 2, &FcmConfig::default()).unwrap();
    let h = s.task_cap;
    let robots = [
        RobotState { robot_id: 1, current_node: 1, cumulative_cost: 4.0, tasks_done: h, finished: false },
        RobotState { robot_id: 2, current_node: 2, cumulative_cost: 3.0, tasks_done: 1, finished: false },
    ];
    let params = BigraphParams { weights: WeightParams::new(1000.0).unwrap(), task_cap: h, depot_enabled: true };
    let g = build_bigraph(&robots, &[3, 4], &Memberships::Fuzzy(&mm), &costs, &params).unwrap();
    let edges: Vec<usize> = g.edges_of(1).map(|e| e.node).collect();
    assert_eq!(edges, vec![DEPOT]);
    assert!(g.edges_of(2).any(|e| e.node == 3));
    for e in &g.edges {
        assert!(g.robot_vertices.contains(&e.robot) && g.task_vertices.contains(&e.node));
    }
}

#[test]
fn finished_robots_leave_the_graph() {
    let s = generate_scenario(1, 2, 6, 10.0).unwrap();
    let robots = [
        RobotState { robot_id: 1, current_node: 0, cumulative_cost: 9.0, tasks_done: 2, finished: true },
        RobotState { robot_id: 2, current_node: 2, cumulative_cost: 3.0, tasks_done: 2, finished: false },
    ];
    let params = BigraphParams { weights: WeightParams::new(1000.0).unwrap(), task_cap: 7, depot_enabled: true };
    let g = build_bigraph(&robots, &[3, 4], &Memberships::Constant(1.0), &s.cost_matrix(), &params).unwrap();
    assert_eq!(g.robot_vertices, vec![2]);
}

#[test]
fn edge_dump() {
    let s = generate_scenario(1, 2, 3, 10.0).unwrap();
    let robots = [RobotState { robot_id: 1, current_node: 1, cumulative_cost: 0.0, tasks_done: 1, finished: false }];
    let params = BigraphParams { weights: WeightParams::new(1000.0).unwrap(), task_cap: 3, depot_enabled: false };
    let g = build_bigraph(&robots, &[2, 3], &Memberships::Constant(0.5), &s.cost_matrix(), &params).unwrap();
    let mut out = Vec::new();
    g.write_edges_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().next(), Some("robot_id,node_id,weight"));
    assert_eq!(text.lines().count(), 3);
}
