//! Benchmark protocol: seeded repetitions of each case, every algorithm on
//! the same scenario, cost/spread/time aggregation and report emission.

use std::fmt;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::allocation::{allocate, DecMataParams, MembershipMode};
use crate::baseline::{build_milp, load_tours, overall_cost, solve_exact, EXACT_MAX_TASKS};
use crate::error::{Error, Result};
use crate::scenario::{generate_scenario, max_tasks_per_robot, Scenario, DEFAULT_EXTENT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    /// Centralized mTSP baseline.
    #[serde(rename = "CNT")]
    Cnt,
    /// Dec-MATA with fuzzy clustering.
    #[serde(rename = "DM")]
    Dm,
    /// Clustering replaced by a constant membership of 1.00.
    #[serde(rename = "DMNF_1")]
    DmNf1,
    /// Clustering replaced by a constant membership of 0.01.
    #[serde(rename = "DMNF_001")]
    DmNf001,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Cnt, Algorithm::Dm, Algorithm::DmNf1, Algorithm::DmNf001];

    pub fn tag(&self) -> &'static str {
        match self {
            Algorithm::Cnt => "CNT",
            Algorithm::Dm => "DM",
            Algorithm::DmNf1 => "DMNF_1",
            Algorithm::DmNf001 => "DMNF_001",
        }
    }

    /// Membership mode of the decentralized variants.
    pub fn membership_mode(&self) -> Option<MembershipMode> {
        match self {
            Algorithm::Cnt => None,
            Algorithm::Dm => Some(MembershipMode::Fcm),
            Algorithm::DmNf1 => Some(MembershipMode::Constant(1.0)),
            Algorithm::DmNf001 => Some(MembershipMode::Constant(0.01)),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::param(format!("unknown algorithm `{s}` (expected CNT, DM, DMNF_1 or DMNF_001)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub case_id: usize,
    pub n: usize,
    pub m: usize,
    pub h: usize,
    pub repetitions: usize,
    pub base_seed: u64,
}

impl CaseSpec {
    /// Case with the standard cap, 10 repetitions and a base seed derived
    /// from the case id.
    pub fn new(case_id: usize, n: usize, m: usize) -> Self {
        Self { case_id, n, m, h: max_tasks_per_robot(n, m), repetitions: 10, base_seed: 1000 * case_id as u64 }
    }

    pub fn with_repetitions(mut self, repetitions: usize) -> Self {
        self.repetitions = repetitions;
        self
    }

    pub fn with_base_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn seed(&self, rep: usize) -> u64 {
        self.base_seed + rep as u64
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n < self.m {
            return Err(Error::param(format!("case {}: need 1 <= m <= n", self.case_id)));
        }
        if self.h != max_tasks_per_robot(self.n, self.m) {
            return Err(Error::param(format!(
                "case {}: cap {} differs from round(n/m)+2 = {}",
                self.case_id,
                self.h,
                max_tasks_per_robot(self.n, self.m)
            )));
        }
        if self.repetitions == 0 {
            return Err(Error::param(format!("case {}: repetitions must be at least 1", self.case_id)));
        }
        Ok(())
    }
}

/// The seven (n, m) benchmark cases.
pub fn benchmark_cases() -> Vec<CaseSpec> {
    [(10, 2), (12, 4), (24, 8), (20, 10), (60, 20), (80, 4), (100, 50)]
        .into_iter()
        .enumerate()
        .map(|(k, (n, m))| CaseSpec::new(k + 1, n, m))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub overall_cost: f64,
    pub agent_costs: Vec<f64>,
    pub wall_time: Duration,
    /// Set for CNT runs solved in-process.
    pub proven_optimal: Option<bool>,
}

impl RunResult {
    pub fn sigma(&self) -> f64 {
        agent_cost_stddev(&self.agent_costs).unwrap_or(0.0)
    }
}

/// All runs of one repetition, on one shared scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Repetition {
    pub rep: usize,
    pub scenario: Scenario,
    pub runs: Vec<RunResult>,
}

impl Repetition {
    pub fn run(&self, algorithm: Algorithm) -> Option<&RunResult> {
        self.runs.iter().find(|r| r.algorithm == algorithm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub case: usize,
    pub n: usize,
    pub m: usize,
    pub h: usize,
    pub algorithm: Algorithm,
    pub mean_cost: f64,
    pub mean_sigma: f64,
    pub mean_time_s: f64,
    /// `(mean_cost - CNT mean_cost) / CNT mean_cost`; empty without CNT.
    pub gap_vs_cnt: Option<f64>,
}

/// Where centralized results come from.
#[derive(Debug, Clone, PartialEq)]
pub enum CntSource {
    /// In-process branch and bound (desk-scale cases only).
    Exact { budget: Duration },
    /// Solution files `case{case}_rep{rep}.json` from an external solver.
    External { dir: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub extent: f64,
    pub k_b: f64,
    pub cnt: CntSource,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            extent: DEFAULT_EXTENT,
            k_b: crate::bigraph::DEFAULT_K_B,
            cnt: CntSource::Exact { budget: Duration::from_secs(60) },
        }
    }
}

/// Population standard deviation of per-robot costs.
pub fn agent_cost_stddev(costs: &[f64]) -> Result<f64> {
    if costs.is_empty() {
        return Err(Error::param("standard deviation of an empty cost list"));
    }
    let n = costs.len() as f64;
    let mean = costs.iter().sum::<f64>() / n;
    let var = costs.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / n;
    Ok(var.sqrt())
}

fn normalized(algorithms: &[Algorithm]) -> Vec<Algorithm> {
    let mut algs = algorithms.to_vec();
    algs.sort();
    algs.dedup();
    algs
}

fn run_cnt(spec: &CaseSpec, rep: usize, scenario: &Scenario, opts: &BenchOptions) -> Result<RunResult> {
    let costs = scenario.cost_matrix();
    match &opts.cnt {
        CntSource::Exact { budget } => {
            let started = Instant::now();
            let model = build_milp(&costs, scenario.robot_count, scenario.task_cap)?;
            let solution = solve_exact(&model, *budget)?;
            let wall_time = started.elapsed();
            let agent_costs = solution.tours.iter().map(|t| costs.path_cost(t)).collect();
            Ok(RunResult {
                algorithm: Algorithm::Cnt,
                overall_cost: solution.objective,
                agent_costs,
                wall_time,
                proven_optimal: Some(solution.proven_optimal),
            })
        }
        CntSource::External { dir } => {
            let path = dir.join(format!("case{}_rep{rep}.json", spec.case_id));
            let tours = load_tours(&std::fs::read_to_string(&path)?)?;
            Ok(RunResult {
                algorithm: Algorithm::Cnt,
                overall_cost: overall_cost(&tours, &costs),
                agent_costs: tours.iter().map(|t| costs.path_cost(t)).collect(),
                wall_time: Duration::ZERO,
                proven_optimal: None,
            })
        }
    }
}

fn run_decentralized(algorithm: Algorithm, scenario: &Scenario, opts: &BenchOptions) -> Result<RunResult> {
    let mode = algorithm.membership_mode().expect("decentralized variant");
    let mut params = DecMataParams::seeded(scenario.seed).with_mode(mode);
    params.k_b = opts.k_b;
    let started = Instant::now();
    let (plan, _) = allocate(scenario, &params)?;
    let wall_time = started.elapsed();
    Ok(RunResult {
        algorithm,
        overall_cost: plan.overall_cost,
        agent_costs: plan.agent_costs(),
        wall_time,
        proven_optimal: None,
    })
}

/// Runs every repetition of a case and keeps the individual results.
pub fn run_case_detailed(spec: &CaseSpec, algorithms: &[Algorithm], opts: &BenchOptions) -> Result<Vec<Repetition>> {
    spec.validate()?;
    let algorithms = normalized(algorithms);
    if algorithms.contains(&Algorithm::Cnt) && matches!(opts.cnt, CntSource::Exact { .. }) && spec.n > EXACT_MAX_TASKS {
        return Err(Error::UnsupportedSize(format!(
            "case {}: exact baseline supports at most {EXACT_MAX_TASKS} tasks, got {}; supply external solutions",
            spec.case_id, spec.n
        )));
    }
    (0..spec.repetitions)
        .map(|rep| {
            let scenario = generate_scenario(spec.seed(rep), spec.m, spec.n, opts.extent)?;
            let runs = algorithms
                .iter()
                .map(|&a| match a {
                    Algorithm::Cnt => run_cnt(spec, rep, &scenario, opts),
                    _ => run_decentralized(a, &scenario, opts),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Repetition { rep, scenario, runs })
        })
        .collect()
}

/// Aggregates repetitions into one row per algorithm, in tag order.
pub fn summarize(spec: &CaseSpec, reps: &[Repetition]) -> Vec<SummaryRow> {
    let Some(first) = reps.first() else { return Vec::new() };
    let count = reps.len() as f64;
    let mean = |alg: Algorithm, f: &dyn Fn(&RunResult) -> f64| -> f64 {
        reps.iter().filter_map(|r| r.run(alg)).map(f).sum::<f64>() / count
    };
    let cnt_mean = first.run(Algorithm::Cnt).map(|_| mean(Algorithm::Cnt, &|r| r.overall_cost));
    first
        .runs
        .iter()
        .map(|run| {
            let alg = run.algorithm;
            let mean_cost = mean(alg, &|r| r.overall_cost);
            SummaryRow {
                case: spec.case_id,
                n: spec.n,
                m: spec.m,
                h: spec.h,
                algorithm: alg,
                mean_cost,
                mean_sigma: mean(alg, &|r| r.sigma()),
                mean_time_s: mean(alg, &|r| r.wall_time.as_secs_f64()),
                gap_vs_cnt: cnt_mean.map(|c| if alg == Algorithm::Cnt { 0.0 } else { (mean_cost - c) / c }),
            }
        })
        .collect()
}

pub fn run_case(spec: &CaseSpec, algorithms: &[Algorithm], opts: &BenchOptions) -> Result<Vec<SummaryRow>> {
    let reps = run_case_detailed(spec, algorithms, opts)?;
    Ok(summarize(spec, &reps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::param(format!("unknown report format `{s}`"))),
        }
    }
}

/// Writes summary rows with columns
/// `case,n,m,h,algorithm,mean_cost,mean_sigma,mean_time_s,gap_vs_cnt`.
pub fn emit_report<W: Write>(rows: &[SummaryRow], format: ReportFormat, mut out: W) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn read_report_csv<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<Vec<SummaryRow>, _>>()?)
}

/// Per-run rows for plotting: `case,rep,seed,algorithm,overall_cost,sigma,time_s,agent_costs`
/// (agent costs `;`-separated).
pub fn write_runs_csv<W: Write>(spec: &CaseSpec, reps: &[Repetition], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["case", "rep", "seed", "algorithm", "overall_cost", "sigma", "time_s", "agent_costs"])?;
    for rep in reps {
        for run in &rep.runs {
            let agents: Vec<String> = run.agent_costs.iter().map(|c| c.to_string()).collect();
            w.write_record([
                spec.case_id.to_string(),
                rep.rep.to_string(),
                rep.scenario.seed.to_string(),
                run.algorithm.to_string(),
                run.overall_cost.to_string(),
                run.sigma().to_string(),
                run.wall_time.as_secs_f64().to_string(),
                agents.join(";"),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stddev_examples() {
        assert_eq!(agent_cost_stddev(&[5.0, 5.0, 5.0]).unwrap(), 0.0);
        assert_eq!(agent_cost_stddev(&[0.0, 10.0]).unwrap(), 5.0);
        assert!(agent_cost_stddev(&[]).is_err());
    }

    #[test]
    fn case_table() {
        let cases = benchmark_cases();
        assert_eq!(cases.len(), 7);
        let h: Vec<usize> = cases.iter().map(|c| c.h).collect();
        assert_eq!(h, vec![7, 5, 5, 4, 5, 22, 4]);
    }

    #[test]
    fn algorithm_tags_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.tag().parse::<Algorithm>().unwrap(), a);
        }
        assert!("DM2".parse::<Algorithm>().is_err());
    }

    #[test]
    fn oversized_exact_baseline_is_refused() {
        let spec = CaseSpec::new(6, 80, 4).with_repetitions(1);
        let err = run_case(&spec, &[Algorithm::Cnt, Algorithm::Dm], &BenchOptions::default()).unwrap_err();
        assert!(matches!(err, Error::UnsupportedSize(_)));
    }

    #[test]
    fn inconsistent_cap_is_refused() {
        let mut spec = CaseSpec::new(1, 10, 2);
        spec.h = 3;
        assert!(run_case(&spec, &[Algorithm::Dm], &BenchOptions::default()).is_err());
    }

    #[test]
    fn cnt_rows_have_zero_gap_and_order_is_stable() {
        let spec = CaseSpec::new(1, 6, 2).with_repetitions(2);
        let rows = run_case(&spec, &[Algorithm::DmNf1, Algorithm::Dm, Algorithm::Cnt], &BenchOptions::default()).unwrap();
        let tags: Vec<_> = rows.iter().map(|r| r.algorithm).collect();
        assert_eq!(tags, vec![Algorithm::Cnt, Algorithm::Dm, Algorithm::DmNf1]);
        assert_eq!(rows[0].gap_vs_cnt, Some(0.0));
        assert!(rows[1].gap_vs_cnt.unwrap() >= -1e-9);
    }
}
