//! Compare fuzzy memberships with the two constant-membership variants on
//! the same seeded scenarios.

use decmata::{allocate, generate_scenario, DecMataParams, MembershipMode};

fn main() -> decmata::Result<()> {
    let modes = [MembershipMode::Fcm, MembershipMode::Constant(1.0), MembershipMode::Constant(0.01)];
    for (m, n) in [(2, 10), (4, 12), (8, 24)] {
        let mut totals = [0.0; 3];
        let seeds = 30;
        for seed in 0..seeds {
            let scenario = generate_scenario(seed, m, n, 10.0)?;
            for (total, mode) in totals.iter_mut().zip(modes) {
                let params = DecMataParams::seeded(seed).with_mode(mode);
                *total += allocate(&scenario, &params)?.0.overall_cost;
            }
        }
        let means: Vec<String> = modes
            .iter()
            .zip(totals)
            .map(|(mode, t)| format!("{mode} {:.2}", t / seeds as f64))
            .collect();
        println!("m={m}, n={n}: {}", means.join(", "));
    }
    Ok(())
}
