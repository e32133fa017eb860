//! Build the weighted robot/task graph for one decision round by hand and
//! dump its edge list.

use decmata::fcm::{fcm_cluster, FcmConfig};
use decmata::{build_bigraph, generate_scenario, BigraphParams, Memberships, RobotState, WeightParams};

fn main() -> decmata::Result<()> {
    let scenario = generate_scenario(2, 2, 6, 10.0)?;
    let costs = scenario.cost_matrix();
    let mm = fcm_cluster(&scenario.task_locations(), 2, &FcmConfig::with_seed(2))?;

    // Robot 1 finished task 1, robot 2 finished task 4; the depot is open.
    let robots = [
        RobotState { robot_id: 1, current_node: 1, cumulative_cost: costs.get(0, 1), tasks_done: 1, finished: false },
        RobotState { robot_id: 2, current_node: 4, cumulative_cost: costs.get(0, 4), tasks_done: 1, finished: false },
    ];
    let params = BigraphParams { weights: WeightParams::new(1000.0)?, task_cap: scenario.task_cap, depot_enabled: true };
    let g = build_bigraph(&robots, &[2, 3, 5, 6], &Memberships::Fuzzy(&mm), &costs, &params)?;

    println!("robots {:?}, nodes {:?}", g.robot_vertices, g.task_vertices);
    g.write_edges_csv(std::io::stdout().lock())?;
    Ok(())
}
