//! Soft-cluster the tasks of a scenario with fuzzy c-means, one cluster per
//! robot, and print the membership matrix as CSV.

use decmata::{fcm_cluster, generate_scenario, FcmConfig};

fn main() -> decmata::Result<()> {
    let scenario = generate_scenario(2, 4, 12, 10.0)?;
    let mm = fcm_cluster(&scenario.task_locations(), scenario.robot_count, &FcmConfig::with_seed(scenario.seed))?;

    println!(
        "{} iterations, converged: {}, objective {:.4} (unsquared {:.4})",
        mm.iterations, mm.converged, mm.objective, mm.linear_objective
    );
    for (i, c) in mm.centers.iter().enumerate() {
        let owned: Vec<usize> = (0..mm.tasks()).filter(|&j| mm.dominant_cluster(j) == i).map(|j| j + 1).collect();
        println!("cluster {i}: center ({:.2}, {:.2}), dominant for tasks {owned:?}", c.x, c.y);
    }

    let ids: Vec<usize> = scenario.task_ids().collect();
    mm.write_csv(std::io::stdout().lock(), &ids)?;
    Ok(())
}
