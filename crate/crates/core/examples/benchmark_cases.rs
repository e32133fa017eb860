//! Run the benchmark case table and print the summary report as CSV.
//!
//! The exact baseline only covers the first case; pass `--cnt-dir <dir>`
//! with external solutions (`case{c}_rep{r}.json`) to include it elsewhere.
//!
//! ```text
//! cargo run --release --example benchmark_cases -- [reps] [--cnt-dir DIR]
//! ```

use std::time::Duration;

use decmata::baseline::EXACT_MAX_TASKS;
use decmata::harness::{benchmark_cases, emit_report, run_case, Algorithm, BenchOptions, CntSource, ReportFormat};

fn main() -> decmata::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let reps = args.first().and_then(|a| a.parse().ok()).unwrap_or(3);
    let cnt_dir = args.iter().position(|a| a == "--cnt-dir").and_then(|k| args.get(k + 1));

    let mut rows = Vec::new();
    for spec in benchmark_cases() {
        let spec = spec.with_repetitions(reps);
        let (cnt, with_cnt) = match cnt_dir {
            Some(dir) => (CntSource::External { dir: dir.into() }, true),
            None => (CntSource::Exact { budget: Duration::from_secs(60) }, spec.n <= EXACT_MAX_TASKS),
        };
        let mut algos = vec![Algorithm::Dm, Algorithm::DmNf1, Algorithm::DmNf001];
        if with_cnt {
            algos.push(Algorithm::Cnt);
        }
        rows.extend(run_case(&spec, &algos, &BenchOptions { cnt, ..BenchOptions::default() })?);
    }
    emit_report(&rows, ReportFormat::Csv, std::io::stdout().lock())
}
