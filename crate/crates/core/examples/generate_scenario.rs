//! Generate a seeded scenario, inspect its cost matrix and save it as JSON.
//!
//! ```text
//! cargo run --example generate_scenario -- [seed] [robots] [tasks]
//! ```

use decmata::{generate_scenario, load_scenario, save_scenario};

fn main() -> decmata::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let seed = args.first().copied().unwrap_or(7);
    let m = args.get(1).copied().unwrap_or(4) as usize;
    let n = args.get(2).copied().unwrap_or(12) as usize;

    let scenario = generate_scenario(seed, m, n, 10.0)?;
    println!("seed {seed}: {m} robots, {n} tasks, cap {} tasks per robot", scenario.task_cap);
    println!("depot at ({:.3}, {:.3})", scenario.depot.x, scenario.depot.y);

    let costs = scenario.cost_matrix();
    for task in scenario.tasks.iter().take(5) {
        println!(
            "  task {:>2} at ({:.3}, {:.3}), {:.3} from the depot",
            task.id,
            task.location.x,
            task.location.y,
            costs.get(0, task.id)
        );
    }

    let path = std::env::temp_dir().join(format!("decmata_scenario_{seed}.json"));
    save_scenario(&scenario, &path)?;
    assert_eq!(load_scenario(&path)?, scenario);
    println!("saved to {}", path.display());
    Ok(())
}
