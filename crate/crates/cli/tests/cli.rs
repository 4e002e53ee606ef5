use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn looptrace(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_looptrace"))
        .arg("--output-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Generates 200 clean tracks and augments 10% of them; returns the
/// directory holding `augmented.csv` and `labels.csv`.
fn desk_benchmark() -> TempDir {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&looptrace(dir.path(), &["generate"])), 0);
    let clean = dir.path().join("clean.csv");
    let out = looptrace(dir.path(), &["augment", path_str(&clean), "--augment", "0.1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    dir
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn straight_track() -> String {
    let mut s = String::from("selector,lat,lon,time\n");
    for i in 0..60 {
        s.push_str(&format!("bus-1,{},{},{}\n", -22.9 + 0.0005 * f64::from(i), -43.2, 1_380_153_600 + 30 * i));
    }
    s
}

#[test]
fn detect_flags_exactly_the_augmented_selectors() {
    let dir = desk_benchmark();
    let labels = fs::read_to_string(dir.path().join("labels.csv")).unwrap();
    let augmented: BTreeSet<String> = labels
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(1) == Some("augmented"))
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    assert_eq!(augmented.len(), 20);

    let out_dir = dir.path().join("detect");
    let out = looptrace(&out_dir, &["detect", path_str(&dir.path().join("augmented.csv"))]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    let flagged: BTreeSet<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .filter_map(|l| l.strip_prefix("flagged\t"))
        .map(str::to_string)
        .collect();
    assert_eq!(flagged, augmented);
    for name in ["features.csv", "outliers.json", "diagrams.csv", "errors.jsonl"] {
        assert!(out_dir.join(name).is_file(), "{name}");
    }
}

#[test]
fn detect_outputs_independent_of_workers_and_reruns() {
    let dir = desk_benchmark();
    let input = dir.path().join("augmented.csv");
    let run = |workers: &str, tag: &str| {
        let out_dir = dir.path().join(tag);
        let out = looptrace(&out_dir, &["--workers", workers, "--seed", "5", "detect", path_str(&input)]);
        assert_eq!(code(&out), 1);
        ["features.csv", "outliers.json", "diagrams.csv"].map(|n| fs::read(out_dir.join(n)).unwrap())
    };
    let reference = run("1", "w1");
    for (workers, tag) in [("4", "w4"), ("8", "w8"), ("8", "w8-again"), ("1", "w1-again")] {
        assert!(run(workers, tag) == reference, "workers {workers} differ");
    }
}

#[test]
fn straight_track_is_clean() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "line.csv", &straight_track());
    let out = looptrace(dir.path(), &["detect", path_str(&input)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let features = fs::read_to_string(dir.path().join("features.csv")).unwrap();
    let row: Vec<&str> = features.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "bus-1");
    assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn json_format_writes_features_json() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "line.csv", &straight_track());
    let out = looptrace(dir.path(), &["--format", "json", "detect", path_str(&input)]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("features.json")).unwrap()).unwrap();
    assert_eq!(v[0]["selector"], "bus-1");
}

#[test]
fn empty_input_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "empty.csv", "");
    let out = looptrace(dir.path(), &["detect", path_str(&input)]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("no tracks parsed"), "{}", stderr(&out));

    let header_only = write(dir.path(), "header.csv", "selector,lat,lon,time\n");
    let out = looptrace(dir.path(), &["detect", path_str(&header_only)]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("no tracks parsed"));
}

#[test]
fn unreadable_and_malformed_inputs() {
    let dir = TempDir::new().unwrap();
    let out = looptrace(dir.path(), &["detect", path_str(&dir.path().join("missing.csv"))]);
    assert_eq!(code(&out), 3);

    let bad_header = write(dir.path(), "bad.csv", "id,y,x,when\na,1,2,3\n");
    let out = looptrace(dir.path(), &["detect", path_str(&bad_header)]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("selector"), "{}", stderr(&out));
}

#[test]
fn bad_rows_are_reported_not_fatal() {
    let dir = TempDir::new().unwrap();
    let mut body = straight_track();
    body.push_str("bus-1,not-a-lat,-43.2,1380160000\nbus-1,95.0,-43.2,1380160030\n");
    let input = write(dir.path(), "rows.csv", &body);
    let out = looptrace(dir.path(), &["detect", path_str(&input)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let errors = fs::read_to_string(dir.path().join("errors.jsonl")).unwrap();
    assert_eq!(errors.lines().count(), 2);
    for line in errors.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["line"].as_u64().unwrap() > 60);
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "line.csv", &straight_track());
    let cases: [&[&str]; 6] = [
        &["calibrate", path_str(&input), "--augment", "0.1", "--grid", ""],
        &["detect", path_str(&input), "--velocity-k", "-1"],
        &["detect", path_str(&input), "--takens-dim", "0"],
        &["detect", path_str(&input), "--delimiter", "ab"],
        &["augment", path_str(&input), "--augment", "1.5"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = looptrace(dir.path(), args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn calibrate_is_reproducible() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&looptrace(dir.path(), &["generate", "--tracks", "60"])), 0);
    let clean = dir.path().join("clean.csv");
    let run = |tag: &str| {
        let out_dir = dir.path().join(tag);
        let args = ["--seed", "9", "calibrate", path_str(&clean), "--augment", "0.1", "--grid", "0.5,10"];
        let out = looptrace(&out_dir, &args);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert!(String::from_utf8_lossy(&out.stdout).contains("chosen_k="));
        ["sweep.csv", "sweep.json", "auc.svg", "labels.csv"].map(|n| fs::read(out_dir.join(n)).unwrap())
    };
    assert!(run("a") == run("b"));
}

#[test]
fn sweep_reads_labels_and_plot_renders() {
    let dir = desk_benchmark();
    let (input, labels) = (dir.path().join("augmented.csv"), dir.path().join("labels.csv"));
    let out = looptrace(dir.path(), &["sweep", path_str(&input), "--labels", path_str(&labels), "--grid", "1,10"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let sweep: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(sweep["per_k"][1]["auc"].as_f64().unwrap(), 1.0);

    let plots = dir.path().join("plots");
    let out = looptrace(&plots, &["plot", "--sweep", path_str(&dir.path().join("sweep.json"))]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(fs::read_to_string(plots.join("auc.svg")).unwrap().starts_with("<svg"));

    assert_eq!(code(&looptrace(dir.path(), &["detect", path_str(&input)])), 1);
    let out = looptrace(&plots, &["plot", path_str(&dir.path().join("features.csv"))]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let svg = fs::read_to_string(plots.join("scatter.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="mark"#).count(), 200);
    assert_eq!(svg.matches(r#"class="mark flagged""#).count(), 20);
}

#[test]
fn plot_names_missing_columns() {
    let dir = TempDir::new().unwrap();
    let features = write(dir.path(), "f.csv", "selector,n_points,m1_km\na,3,0.5\n");
    let out = looptrace(dir.path(), &["plot", path_str(&features)]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("n_h1, m1_birth_km"), "{}", stderr(&out));
}

#[test]
fn quasi_matrix_input() {
    let dir = TempDir::new().unwrap();
    // Four corners of a unit square with slightly asymmetric directional costs.
    let table = "0,1,1.5,1\n1.1,0,1,1.4\n1.4,1,0,1\n1,1.5,1.1,0\n";
    let input = write(dir.path(), "square.csv", table);
    let out = looptrace(dir.path(), &["detect", "--quasi-matrix", path_str(&input), "--threshold", "0.1"]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("flagged\tsquare"));
}
