//! Run the decentralized allocation on a generated scenario, print every
//! robot's route and check the plan.
//!
//! ```text
//! cargo run --example allocate_mission -- [seed]
//! ```

use decmata::{allocate, generate_scenario, verify_plan, DecMataParams};

fn main() -> decmata::Result<()> {
    let seed = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(7);
    let scenario = generate_scenario(seed, 4, 12, 10.0)?;
    let (plan, trace) = allocate(&scenario, &DecMataParams::seeded(seed))?;

    for rec in &trace.records {
        println!(
            "round {}: {} robots x {} nodes{}, decisions {:?}",
            rec.iteration,
            rec.robot_vertices,
            rec.task_vertices,
            if rec.depot_enabled { " (depot open)" } else { "" },
            rec.matching.pairs
        );
    }
    for route in &plan.routes {
        println!("robot {}: {:?} cost {:.3}", route.robot_id, route.nodes, route.cost);
    }
    println!("overall {:.3}, spread {:.3}", plan.overall_cost, plan.agent_cost_stddev);

    let violations = verify_plan(&scenario, &plan);
    assert!(violations.is_empty(), "{violations:?}");
    Ok(())
}
