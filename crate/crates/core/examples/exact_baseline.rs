//! Solve a small instance exactly and compare the decentralized plan with
//! the optimum.

use std::time::Duration;

use decmata::{allocate, build_milp, generate_scenario, solve_exact, DecMataParams};

fn main() -> decmata::Result<()> {
    let scenario = generate_scenario(11, 2, 8, 10.0)?;
    let costs = scenario.cost_matrix();
    let model = build_milp(&costs, scenario.robot_count, scenario.task_cap)?;
    let exact = solve_exact(&model, Duration::from_secs(30))?;
    println!(
        "optimum {:.3} ({} search nodes, proven: {})",
        exact.objective, exact.nodes_explored, exact.proven_optimal
    );
    for tour in &exact.tours {
        println!("  {tour:?}");
    }

    let (plan, _) = allocate(&scenario, &DecMataParams::seeded(scenario.seed))?;
    let gap = (plan.overall_cost - exact.objective) / exact.objective;
    println!("decentralized {:.3}, gap {:.1}%", plan.overall_cost, 100.0 * gap);
    Ok(())
}
