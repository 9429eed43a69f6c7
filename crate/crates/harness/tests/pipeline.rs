use std::fs;
use std::path::Path;
use std::process::Command;

use qde_harness::export::load_summary;
use qde_harness::runner::trace_ref;
use qde_harness::{
    analyze, export_results, load_runs, parse_config, run_matrix, AlgorithmId, ConfigLayer, ExperimentPlan,
    HarnessError, Hypothesis,
};

const GENERATIONS: usize = 8;

fn smoke_plan(out: &Path, jobs: usize) -> ExperimentPlan {
    parse_config(
        None,
        ConfigLayer {
            tier: Some("smoke".into()),
            generations: Some(GENERATIONS),
            out: Some(out.to_path_buf()),
            jobs: Some(jobs),
            ..Default::default()
        },
    )
    .unwrap()
}

fn run_and_export(plan: &ExperimentPlan) -> (usize, usize) {
    let outcome = run_matrix(plan).unwrap();
    assert!(outcome.failures.is_empty());
    export_results(plan, &outcome.rows).unwrap();
    (outcome.executed, outcome.reused)
}

fn read(path: &Path) -> Vec<u8> {
    fs::read(path).unwrap()
}

#[test]
fn smoke_tier_writes_one_record_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let plan = smoke_plan(dir.path(), 0);
    run_and_export(&plan);
    let rows = load_runs(dir.path()).unwrap();
    assert_eq!(rows.len(), 13 * 5 * 20);
    assert!(rows.iter().all(|r| r.dimension == 3 && r.replicate < 20));
    let summary = load_summary(&dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.len(), 13 * 5);
    assert!(summary.iter().all(|s| s.count == 20));
}

#[test]
fn rerun_reuses_traces_and_reexports_identically() {
    let dir = tempfile::tempdir().unwrap();
    let plan = smoke_plan(dir.path(), 0);
    let (executed, reused) = run_and_export(&plan);
    assert_eq!((executed, reused), (1300, 0));
    let runs = read(&dir.path().join("runs.csv"));
    let summary = read(&dir.path().join("summary.csv"));

    assert_eq!(run_and_export(&plan), (0, 1300));
    assert_eq!(read(&dir.path().join("runs.csv")), runs);
    assert_eq!(read(&dir.path().join("summary.csv")), summary);

    let victim: AlgorithmId = "Polar-PM3".parse().unwrap();
    let trace = dir.path().join(trace_ref(&victim, 12, 3, 7));
    let before = read(&trace);
    fs::remove_file(&trace).unwrap();
    assert_eq!(run_and_export(&plan), (1, 1299));
    assert_eq!(read(&trace), before);
    assert_eq!(read(&dir.path().join("summary.csv")), summary);
}

#[test]
fn worker_count_does_not_change_results() {
    let serial = tempfile::tempdir().unwrap();
    let parallel = tempfile::tempdir().unwrap();
    run_and_export(&smoke_plan(serial.path(), 1));
    run_and_export(&smoke_plan(parallel.path(), 4));
    for file in ["runs.csv", "summary.csv"] {
        assert_eq!(read(&serial.path().join(file)), read(&parallel.path().join(file)), "{file}");
    }
}

#[test]
fn exported_runs_feed_every_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let plan = smoke_plan(dir.path(), 0);
    run_and_export(&plan);
    let rows = load_runs(dir.path()).unwrap();
    for h in Hypothesis::ALL {
        for a in analyze(&plan, &rows, h, 0.05).unwrap() {
            let k = a.treatments.len();
            let sum: f64 = a.friedman.mean_ranks.iter().sum();
            assert!((sum - (k * (k + 1)) as f64 / 2.0).abs() < 1e-9, "{}", a.name);
            assert!((0.0..=1.0).contains(&a.friedman.p_value));
        }
    }
}

#[test]
fn missing_cells_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let plan = smoke_plan(dir.path(), 0);
    run_and_export(&plan);
    let rows: Vec<_> = load_runs(dir.path())
        .unwrap()
        .into_iter()
        .filter(|r| !(r.algorithm == "E4-RQ" && r.function_id == 15))
        .collect();
    match analyze(&plan, &rows, Hypothesis::All, 0.05) {
        Err(HarnessError::IncompleteMatrix { missing }) => {
            assert_eq!(missing.len(), 20);
            assert!(missing[0].contains("E4-RQ"), "{missing:?}");
        }
        other => panic!("expected an incomplete matrix, got {other:?}"),
    }
}

#[test]
fn json_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut plan = smoke_plan(dir.path(), 0);
    plan.format = qde_harness::ExportFormat::Json;
    plan.algorithms = vec!["Polar-PM1".parse().unwrap(), "Real-DE".parse().unwrap()];
    plan.replicates = 3;
    run_and_export(&plan);
    assert!(!dir.path().join("runs.csv").exists());
    assert_eq!(load_runs(dir.path()).unwrap().len(), 2 * 5 * 3);
    assert_eq!(load_summary(&dir.path().join("summary.json")).unwrap().len(), 2 * 5);
}

#[test]
fn file_layer_sits_between_defaults_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plan.toml");
    fs::write(&path, "np = 40\ncr = 0.7\nfunctions = [1, 8]\n").unwrap();
    let plan = parse_config(Some(&path), ConfigLayer { np: Some(50), ..Default::default() }).unwrap();
    assert_eq!(plan.population_size, 50);
    assert_eq!(plan.crossover_rate, 0.7);
    assert_eq!(plan.functions, vec![1, 8]);
    assert_eq!(plan.beta, 0.5);
    let np = &plan.provenance.resolved["np"];
    assert_eq!((np.file.as_deref(), np.flag.as_deref()), (Some("40"), Some("50")));
}

#[test]
fn malformed_file_names_line_and_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "seeds = 5\nbeta = \"half\"\n").unwrap();
    let err = parse_config(Some(&path), ConfigLayer::default()).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("line 2") && msg.contains("beta"), "{msg}");
    assert_eq!(err.exit_code(), 2);
}

fn qde(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qde")).args(args).output().unwrap()
}

#[test]
fn cli_lists_the_roster() {
    let out = qde(&["list", "algorithms"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 13);
    assert!(text.lines().any(|l| l == "Real-DE"));
    let out = qde(&["list", "functions"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 24);
}

#[test]
fn cli_rejects_bad_configuration_with_exit_code_two() {
    let out = qde(&["run", "--algorithms", "PM2", "--out", "/nonexistent/never-written"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    for tag in ["PM1", "PM3", "PM13", "RQ"] {
        assert!(err.contains(tag), "{err}");
    }
    let out = qde(&["run", "--np", "3", "--out", "/nonexistent/never-written"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_run_then_show() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let common = ["--functions", "1", "--algorithms", "Polar-PM1", "--seeds", "2", "--generations", "5"];
    let out = qde(&[&["run", "--out", out_dir][..], &common].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("summary.csv").exists());
    let out = qde(&[&["show", "--out", out_dir, "--algorithm", "Polar-PM1", "--function", "1"][..], &common].concat());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 6);
}
