use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use drpa_harness::emit::emit_all;
use drpa_harness::{run_experiment, AggregateReport, ExperimentConfig, HarnessError};

fn small(workers: usize) -> ExperimentConfig {
    ExperimentConfig {
        betas: vec![0.0, 0.3, 0.8],
        rs: vec![5, 20],
        runs_per_config: 2,
        target_n: 150,
        workers,
        ..Default::default()
    }
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn emit_to(cfg: &ExperimentConfig) -> (tempfile::TempDir, BTreeMap<String, Vec<u8>>) {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(cfg).unwrap();
    emit_all(&report, dir.path()).unwrap();
    let files = read_dir(dir.path());
    (dir, files)
}

#[test]
fn same_seed_gives_byte_identical_outputs() {
    let (_a, first) = emit_to(&small(1));
    let (_b, second) = emit_to(&small(1));
    let (_c, parallel) = emit_to(&small(3));
    assert_eq!(first, second);
    assert_eq!(first, parallel);
}

#[test]
fn different_seed_changes_outputs() {
    let (_a, first) = emit_to(&small(1));
    let (_b, other) = emit_to(&ExperimentConfig {
        base_seed: 7,
        ..small(1)
    });
    assert_ne!(first["table2.csv"], other["table2.csv"]);
}

#[test]
fn expected_file_set() {
    let cfg = small(1);
    let (_d, files) = emit_to(&cfg);
    for name in [
        "table1.csv",
        "table2.csv",
        "table3.csv",
        "manifest.json",
        "fig_rci_by_r.csv",
        "fig_rci_by_beta.csv",
        "fig_rank_arrival_top10pct.csv",
        "fig_max_arrival_top1pct.csv",
        "fig_arrival_by_rank_top5pct.csv",
        "fig_trajectories.csv",
        "fig_trajectory_bursts.csv",
        "run_0.3_20_1.csv",
        "run_pa_0.csv",
    ] {
        assert!(files.contains_key(name), "missing {name}");
    }
    let runs = files.keys().filter(|k| k.starts_with("run_")).count();
    assert_eq!(runs, cfg.total_runs());
}

fn text(files: &BTreeMap<String, Vec<u8>>, name: &str) -> String {
    String::from_utf8(files[name].clone()).unwrap()
}

#[test]
fn table_shapes() {
    let (_d, files) = emit_to(&small(1));
    let t1 = text(&files, "table1.csv");
    let lines: Vec<&str> = t1.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("network,runs,top1,"));
    assert!(lines[0].ends_with("top10,mean"));
    assert!(lines[1].starts_with("DRPA,8,"));
    assert!(lines[2].starts_with("PA,4,"));

    let t2 = text(&files, "table2.csv");
    let lines: Vec<&str> = t2.lines().collect();
    assert_eq!(lines[0], "network,beta,runs,max,variance,skewness,mean,min");
    assert!(lines[1].starts_with("PA,,2,"));
    assert_eq!(lines.len(), 1 + 1 + 3);

    let t3 = text(&files, "table3.csv");
    assert_eq!(t3.lines().count(), 1 + 2);
    assert!(t3.lines().nth(1).unwrap().starts_with("0.3,pooled,1,1,"));
}

#[test]
fn run_file_records_every_node() {
    let (_d, files) = emit_to(&small(1));
    let body = text(&files, "run_0.8_5_0.csv");
    let mut lines = body.lines();
    assert_eq!(
        lines.next().unwrap(),
        "node_id,arrival,final_degree,rank,rank_arrival_diff"
    );
    let rows: Vec<Vec<i64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 150);
    let degree_sum: i64 = rows.iter().map(|r| r[2]).sum();
    assert_eq!(degree_sum, 2 * 149);
    assert_eq!(rows.iter().map(|r| r[4]).sum::<i64>(), 0);
}

#[test]
fn manifest_lists_files_and_seeds() {
    let (_d, files) = emit_to(&small(1));
    let manifest: serde_json::Value = serde_json::from_slice(&files["manifest.json"]).unwrap();
    assert_eq!(manifest["runs"].as_array().unwrap().len(), small(1).total_runs());
    let listed = manifest["files"].as_array().unwrap().len();
    assert_eq!(listed, files.len());
    assert_eq!(manifest["config"]["target_n"], 150);
}

#[test]
fn empty_report_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let report = AggregateReport::assemble(small(1), Vec::new()).unwrap();
    assert!(matches!(
        emit_all(&report, dir.path()),
        Err(HarnessError::IncompleteReport(_))
    ));
}

#[test]
fn missing_groups_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let no_pa_grid = ExperimentConfig {
        betas: vec![0.5],
        ..small(1)
    };
    let report = run_experiment(&no_pa_grid).unwrap();
    let err = emit_all(&report, dir.path()).unwrap_err();
    assert!(matches!(err, HarnessError::IncompleteReport(ref m) if m.contains("table1")));
    assert_eq!(err.exit_code(), 2);

    let mut no_baseline = ExperimentConfig {
        pa_baseline: false,
        ..small(1)
    };
    no_baseline.outputs.table1 = false;
    let report = run_experiment(&no_baseline).unwrap();
    assert!(matches!(
        emit_all(&report, dir.path()),
        Err(HarnessError::IncompleteReport(ref m)) if m.contains("table2")
    ));

    let mut only_pa = ExperimentConfig {
        betas: vec![0.0],
        ..small(1)
    };
    only_pa.outputs.table1 = false;
    only_pa.outputs.table2 = false;
    let report = run_experiment(&only_pa).unwrap();
    assert!(matches!(
        emit_all(&report, dir.path()),
        Err(HarnessError::IncompleteReport(ref m)) if m.contains("table3")
    ));
}

#[test]
fn unwritable_directory_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let report = run_experiment(&small(1)).unwrap();
    let err = emit_all(&report, &blocker.join("sub")).unwrap_err();
    assert_eq!(err.exit_code(), 3, "{err}");
}
