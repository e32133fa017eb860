use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use serde_json::json;

use decmata::baseline::{build_milp, solve_exact, SolutionFile};
use decmata::harness::{
    benchmark_cases, emit_report, run_case_detailed, summarize, write_runs_csv, Algorithm, BenchOptions, CntSource,
    ReportFormat,
};
use decmata::{
    allocate, emit_lp, generate_scenario, load_scenario, save_scenario, verify_plan, DecMataParams, Error,
    MembershipMode, Plan, Result,
};

#[derive(Parser)]
#[command(name = "decmata", version, about = "Decentralized multi-robot task allocation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scenario as JSON.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        robots: usize,
        #[arg(long)]
        tasks: usize,
        #[arg(long, default_value_t = decmata::scenario::DEFAULT_EXTENT)]
        extent: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the decentralized allocation and print the plan.
    Allocate {
        scenario: PathBuf,
        /// `fcm` or `const:<v>`.
        #[arg(long, default_value = "fcm")]
        mode: MembershipMode,
        #[arg(long, default_value_t = decmata::bigraph::DEFAULT_K_B)]
        kb: f64,
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        /// Defaults to the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write one JSON line per decision round here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Solve the centralized mTSP exactly (small instances only).
    Baseline {
        scenario: PathBuf,
        #[arg(long, default_value_t = 60.0)]
        budget_s: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Export the centralized MILP as an LP file.
    EmitLp {
        scenario: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run benchmark cases and print summary rows.
    Bench {
        /// Comma-separated case ids (1-7); all by default.
        #[arg(long, value_delimiter = ',')]
        cases: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, value_delimiter = ',', default_value = "DM,DMNF_1,DMNF_001")]
        algos: Vec<Algorithm>,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
        /// Read CNT solutions `case{c}_rep{r}.json` from this directory.
        #[arg(long)]
        cnt_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 60.0)]
        budget_s: f64,
        /// Also write per-run rows for plotting.
        #[arg(long)]
        runs_csv: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check a plan against a scenario and print the violations.
    Verify { scenario: PathBuf, plan: PathBuf },
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    let mut out = output(path)?;
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn budget(seconds: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(seconds).map_err(|_| Error::Parameter(format!("invalid budget {seconds}")))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { seed, robots, tasks, extent, out } => {
            let scenario = generate_scenario(seed, robots, tasks, extent)?;
            match out {
                Some(p) => save_scenario(&scenario, p),
                None => write_text(None, &scenario.to_json()?),
            }
        }
        Command::Allocate { scenario, mode, kb, gamma, seed, trace, out } => {
            let scenario = load_scenario(scenario)?;
            let mut params = DecMataParams::seeded(seed.unwrap_or(scenario.seed)).with_mode(mode);
            params.k_b = kb;
            params.fcm.gamma = gamma;
            let (plan, log) = allocate(&scenario, &params)?;
            if let Some(p) = trace {
                let mut w = BufWriter::new(File::create(p)?);
                log.write_jsonl(&mut w)?;
                w.flush()?;
            }
            write_text(out.as_deref(), &plan.to_json()?)
        }
        Command::Baseline { scenario, budget_s, out } => {
            let scenario = load_scenario(scenario)?;
            let costs = scenario.cost_matrix();
            let model = build_milp(&costs, scenario.robot_count, scenario.task_cap)?;
            let solution = solve_exact(&model, budget(budget_s)?)?;
            write_text(out.as_deref(), &SolutionFile::new(&solution, &costs).to_json()?)
        }
        Command::EmitLp { scenario, out } => {
            let scenario = load_scenario(scenario)?;
            let model = build_milp(&scenario.cost_matrix(), scenario.robot_count, scenario.task_cap)?;
            match out {
                Some(p) => emit_lp(&model, p),
                None => write_text(None, &model.to_lp_string()),
            }
        }
        Command::Bench { cases, reps, algos, format, cnt_dir, budget_s, runs_csv, out } => {
            let table = benchmark_cases();
            let selected: Vec<_> = if cases.is_empty() {
                table
            } else {
                cases
                    .iter()
                    .map(|&id| {
                        table
                            .iter()
                            .find(|c| c.case_id == id)
                            .copied()
                            .ok_or_else(|| Error::Parameter(format!("unknown case {id}")))
                    })
                    .collect::<Result<_>>()?
            };
            let cnt = match cnt_dir {
                Some(dir) => CntSource::External { dir },
                None => CntSource::Exact { budget: budget(budget_s)? },
            };
            let opts = BenchOptions { cnt, ..BenchOptions::default() };
            let mut rows = Vec::new();
            let mut runs = runs_csv.map(File::create).transpose()?.map(BufWriter::new);
            for spec in selected {
                let spec = spec.with_repetitions(reps);
                let detail = run_case_detailed(&spec, &algos, &opts)?;
                if let Some(w) = runs.as_mut() {
                    write_runs_csv(&spec, &detail, w)?;
                }
                rows.extend(summarize(&spec, &detail));
            }
            if let Some(mut w) = runs {
                w.flush()?;
            }
            let mut w = output(out.as_deref())?;
            emit_report(&rows, format, &mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::Verify { scenario, plan } => {
            let scenario = load_scenario(scenario)?;
            let plan = Plan::from_json(&fs::read_to_string(plan)?)?;
            let violations = verify_plan(&scenario, &plan);
            let report = json!({ "valid": violations.is_empty(), "violations": violations });
            write_text(None, &serde_json::to_string_pretty(&report)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::FAILURE
        }
    }
}
