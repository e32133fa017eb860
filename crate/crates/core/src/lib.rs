//! Decentralized multi-robot task allocation.
//!
//! Tasks are soft-clustered with fuzzy c-means ([`fcm`]), each decision
//! round is posed as a weighted robot/task bipartite graph ([`bigraph`]) and
//! solved by exact maximum-weight matching ([`matching`]); [`allocation`]
//! runs the rounds until every task is served and every robot is back at the
//! depot. [`baseline`] provides the centralized mTSP model, an exact solver
//! for small instances and LP export, and [`harness`] runs the benchmark
//! cases.
//!
//! ```
//! use decmata::{allocate, generate_scenario, verify_plan, DecMataParams};
//!
//! let scenario = generate_scenario(7, 4, 12, 10.0)?;
//! let (plan, _trace) = allocate(&scenario, &DecMataParams::seeded(scenario.seed))?;
//! assert!(verify_plan(&scenario, &plan).is_empty());
//! # Ok::<(), decmata::Error>(())
//! ```

pub mod allocation;
pub mod baseline;
pub mod bigraph;
pub mod error;
pub mod fcm;
pub mod harness;
pub mod matching;
mod rng;
pub mod scenario;

pub use allocation::{
    allocate, decision_step, verify_plan, AllocationTrace, DecMataParams, DecisionContext, MembershipMode, Plan,
    Route, Violation,
};
pub use baseline::{build_milp, emit_lp, overall_cost, solve_exact, ExactSolution, MilpModel};
pub use bigraph::{build_bigraph, edge_weight, Bigraph, BigraphParams, Edge, Memberships, WeightParams};
pub use error::{Error, Result};
pub use fcm::{fcm_cluster, FcmConfig, MembershipMatrix};
pub use harness::{agent_cost_stddev, run_case, Algorithm, CaseSpec, SummaryRow};
pub use matching::{max_weight_matching, max_weight_matching_bruteforce, Matching};
pub use scenario::{
    generate_scenario, load_scenario, max_tasks_per_robot, save_scenario, CostMatrix, Point2D, RobotState, Scenario,
    Task,
};
