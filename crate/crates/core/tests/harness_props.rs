mod common;

use std::time::Duration;

use decmata::harness::{
    agent_cost_stddev, benchmark_cases, emit_report, read_report_csv, run_case, run_case_detailed, summarize,
    write_runs_csv, Algorithm, BenchOptions, CaseSpec, CntSource, ReportFormat, SummaryRow,
};
use decmata::{generate_scenario, Error};
use proptest::prelude::*;

fn costs_only(rows: &[SummaryRow]) -> Vec<(usize, Algorithm, f64, f64, Option<f64>)> {
    rows.iter().map(|r| (r.case, r.algorithm, r.mean_cost, r.mean_sigma, r.gap_vs_cnt)).collect()
}

proptest! {
    #[test]
    fn stddev_matches_recomputation(xs in prop::collection::vec(0.0f64..1000.0, 1..50)) {
        let fast = agent_cost_stddev(&xs).unwrap();
        prop_assert!((fast - common::population_stddev(&xs)).abs() <= 1e-9 * fast.max(1.0));
    }
}

#[test]
fn stddev_examples() {
    assert_eq!(agent_cost_stddev(&[5.0, 5.0, 5.0]).unwrap(), 0.0);
    assert_eq!(agent_cost_stddev(&[0.0, 10.0]).unwrap(), 5.0);
    assert!(matches!(agent_cost_stddev(&[]), Err(Error::Parameter(_))));
}

#[test]
fn repetitions_share_seeded_scenarios() {
    let spec = CaseSpec::new(2, 8, 2).with_repetitions(3).with_base_seed(40);
    let reps = run_case_detailed(&spec, &Algorithm::ALL, &BenchOptions::default()).unwrap();
    for (r, rep) in reps.iter().enumerate() {
        assert_eq!(rep.scenario, generate_scenario(40 + r as u64, 2, 8, 10.0).unwrap());
        assert_eq!(rep.runs.len(), 4);
        for run in &rep.runs {
            assert_eq!(run.agent_costs.len(), 2);
            assert!((run.agent_costs.iter().sum::<f64>() - run.overall_cost).abs() < 1e-9);
            assert_eq!(run.proven_optimal.is_some(), run.algorithm == Algorithm::Cnt);
        }
        let cnt = rep.run(Algorithm::Cnt).unwrap().overall_cost;
        assert!(rep.runs.iter().all(|run| run.overall_cost >= cnt - 1e-9));
    }
    let rows = summarize(&spec, &reps);
    let dm = &rows[1];
    let mean: f64 = reps.iter().map(|r| r.run(Algorithm::Dm).unwrap().overall_cost).sum::<f64>() / 3.0;
    assert!((dm.mean_cost - mean).abs() < 1e-12);
}

#[test]
fn desk_scale_gap_bracket() {
    let spec = CaseSpec::new(1, 8, 2).with_base_seed(300);
    let rows = run_case(&spec, &[Algorithm::Cnt, Algorithm::Dm], &BenchOptions::default()).unwrap();
    let ratio = rows[1].mean_cost / rows[0].mean_cost;
    assert!((1.0..=1.35).contains(&ratio), "DM/CNT = {ratio}");
    assert_eq!(rows[0].gap_vs_cnt, Some(0.0));
    assert!((rows[1].gap_vs_cnt.unwrap() - (ratio - 1.0)).abs() < 1e-12);
}

#[test]
fn constant_membership_variants_agree() {
    let spec = CaseSpec::new(2, 12, 4).with_base_seed(500);
    let rows = run_case(&spec, &[Algorithm::DmNf1, Algorithm::DmNf001], &BenchOptions::default()).unwrap();
    let diff = (rows[0].mean_cost - rows[1].mean_cost).abs() / rows[0].mean_cost;
    assert!(diff < 0.02, "DMNF_1 vs DMNF_001 differ by {diff}");
}

#[test]
fn same_spec_same_costs() {
    let spec = CaseSpec::new(3, 24, 8).with_repetitions(3);
    let algos = [Algorithm::Dm, Algorithm::DmNf1, Algorithm::DmNf001];
    let a = run_case(&spec, &algos, &BenchOptions::default()).unwrap();
    let b = run_case(&spec, &algos, &BenchOptions::default()).unwrap();
    assert_eq!(costs_only(&a), costs_only(&b));
}

#[test]
fn full_table_report() {
    let algos = [Algorithm::Dm, Algorithm::DmNf1, Algorithm::DmNf001];
    let mut rows = Vec::new();
    for spec in benchmark_cases() {
        rows.extend(run_case(&spec.with_repetitions(2), &algos, &BenchOptions::default()).unwrap());
    }
    assert_eq!(rows.len(), 7 * algos.len());
    assert!(rows.iter().all(|r| r.gap_vs_cnt.is_none()));

    let mut csv = Vec::new();
    emit_report(&rows, ReportFormat::Csv, &mut csv).unwrap();
    let text = String::from_utf8(csv.clone()).unwrap();
    assert_eq!(text.lines().next(), Some("case,n,m,h,algorithm,mean_cost,mean_sigma,mean_time_s,gap_vs_cnt"));
    assert_eq!(read_report_csv(csv.as_slice()).unwrap(), rows);

    let mut json = Vec::new();
    emit_report(&rows, ReportFormat::Json, &mut json).unwrap();
    let back: Vec<SummaryRow> = serde_json::from_slice(&json).unwrap();
    assert_eq!(back, rows);
}

#[test]
fn oversized_cnt_needs_external_results() {
    let spec = CaseSpec::new(6, 80, 4).with_repetitions(1);
    let err = run_case(&spec, &[Algorithm::Cnt], &BenchOptions::default()).unwrap_err();
    assert!(matches!(err, Error::UnsupportedSize(_)));

    // A solution file from an outside solver is accepted and scored.
    let dir = tempfile::tempdir().unwrap();
    let s = generate_scenario(spec.seed(0), 4, 80, 10.0).unwrap();
    let tours: Vec<Vec<usize>> = (0..4).map(|r| {
        let mut t = vec![0];
        t.extend((1..=80).filter(|k| k % 4 == r));
        t.push(0);
        t
    }).collect();
    let routes: Vec<_> = tours.iter().map(|t| serde_json::json!({ "nodes": t })).collect();
    std::fs::write(dir.path().join("case6_rep0.json"), serde_json::json!({ "routes": routes }).to_string()).unwrap();
    let opts = BenchOptions { cnt: CntSource::External { dir: dir.path().to_path_buf() }, ..BenchOptions::default() };
    let rows = run_case(&spec, &[Algorithm::Cnt, Algorithm::Dm], &opts).unwrap();
    let expected: f64 = tours.iter().map(|t| s.cost_matrix().path_cost(t)).sum();
    assert!((rows[0].mean_cost - expected).abs() < 1e-9);
    assert_eq!(rows[0].mean_time_s, 0.0);
}

#[test]
fn plot_rows() {
    let spec = CaseSpec::new(1, 10, 2).with_repetitions(2);
    let opts = BenchOptions { cnt: CntSource::Exact { budget: Duration::from_secs(30) }, ..BenchOptions::default() };
    let reps = run_case_detailed(&spec, &[Algorithm::Cnt, Algorithm::Dm], &opts).unwrap();
    let mut out = Vec::new();
    write_runs_csv(&spec, &reps, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2);
    assert!(text.lines().nth(1).unwrap().starts_with("1,0,1000,CNT,"));
}

#[test]
fn dec_mata_time_grows_slowly_with_ratio() {
    // Best of a few runs keeps scheduler noise out of the ratio.
    let time = |m: usize, n: usize| {
        let spec = CaseSpec::new(0, n, m).with_repetitions(3);
        (0..3)
            .map(|_| run_case(&spec, &[Algorithm::Dm], &BenchOptions::default()).unwrap()[0].mean_time_s)
            .fold(f64::INFINITY, f64::min)
    };
    let (small, large) = (time(2, 10), time(4, 80));
    assert!(large < 100.0 * small, "(4,80) {large}s vs (2,10) {small}s");
}
