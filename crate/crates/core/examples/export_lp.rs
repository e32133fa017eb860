//! Write the centralized model as an LP file for an external MILP solver and
//! read it back.

use decmata::baseline::lp::{parse_lp, LpProblem};
use decmata::{build_milp, emit_lp, generate_scenario};

fn main() -> decmata::Result<()> {
    let scenario = generate_scenario(3, 4, 80, 10.0)?;
    let model = build_milp(&scenario.cost_matrix(), scenario.robot_count, scenario.task_cap)?;
    let path = std::env::temp_dir().join("decmata_case6.lp");
    emit_lp(&model, &path)?;

    let text = std::fs::read_to_string(&path)?;
    println!("{} ({} bytes, {} constraints)", path.display(), text.len(), model.constraints.len());
    for line in text.lines().take(4) {
        println!("  {line}");
    }
    assert_eq!(parse_lp(&text)?, LpProblem::from_model(&model));
    Ok(())
}
