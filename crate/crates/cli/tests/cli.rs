use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn optsample(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optsample"))
        .args(args)
        .env("OPTSAMPLE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = optsample(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Data rows of a CSV file, header dropped.
fn rows(file: &Path) -> Vec<Vec<f64>> {
    let mut reader = csv::Reader::from_path(file).unwrap();
    reader.records().map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect()
}

fn json(file: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(file).unwrap()).unwrap()
}

#[test]
fn exponential_pair_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    ok(&[
        "points",
        "--kernel",
        "exponential",
        "--dim",
        "1",
        "--domain",
        "0:1",
        "--n",
        "2",
        "--objective",
        "supnorm",
        "--grid",
        "400",
        "--out",
        path(&out),
    ]);
    let mut x: Vec<f64> = rows(&out.join("points.csv")).iter().map(|r| r[1]).collect();
    x.sort_by(f64::total_cmp);
    assert!((x[0] - 0.1831).abs() < 0.02 && (x[1] - 0.8169).abs() < 0.02, "{x:?}");
    let report = json(&out.join("objective.json"));
    assert_eq!(report["kind"], "supnorm");
    assert!((report["k_omega"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn gaussian_single_point_and_repeatability() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        vec![
            "points".to_string(),
            "--kernel".into(),
            "gaussian".into(),
            "--domain".into(),
            "-3:3".into(),
            "--n".into(),
            "1".into(),
            "--objective".into(),
            "supnorm".into(),
            "--out".into(),
            path(out).into(),
        ]
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let owned = args(out);
        ok(&owned.iter().map(String::as_str).collect::<Vec<_>>());
    }
    let x = rows(&a.join("points.csv"))[0][1];
    assert!(x.abs() < 0.03, "{x}");
    for file in ["points.csv", "objective.json", "manifest.json"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn experiment_outputs_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    fs::write(
        &cfg,
        r#"{"kernel": "gaussian", "dim": 1, "domain": [[-3, 3]], "n": 12, "objective": "subspace",
            "measure": {"type": "equispaced_nodes", "count": 30}, "trials": 40, "seed": 2,
            "search": {"restarts": 4}}"#,
    )
    .unwrap();
    let out = dir.path().join("run");
    ok(&["experiment", path(&cfg), "--out", path(&out)]);
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["trials"], 40);
    assert!(summary["mean_improvement"].as_f64().unwrap() > 0.0);
    assert_eq!(rows(&out.join("errors.csv")).len(), 40);
    for (i, r) in rows(&out.join("plotdata_errors.csv")).iter().enumerate() {
        assert_eq!(r[0], i as f64);
        assert_eq!(r[3], r[1] - r[2]);
    }
    assert_eq!(rows(&out.join("points_opt.csv")).len(), 12);

    let replayed = dir.path().join("replayed");
    ok(&["replay", path(&out.join("manifest.json")), "--out", path(&replayed)]);
    for file in ["errors.csv", "summary.json", "points_opt.csv", "points_equ.csv", "plotdata_errors.csv"] {
        assert_eq!(fs::read(out.join(file)).unwrap(), fs::read(replayed.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn single_trial_has_one_error_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("one.json");
    fs::write(
        &cfg,
        r#"{"kernel": "sinc", "dim": 1, "domain": [[-3, 3]], "n": 4, "objective": "trace",
            "measure": {"type": "grid", "resolution": [61]}, "trials": 1,
            "target": {"terms_min": 2, "terms_max": 2}, "search": {"restarts": 2}}"#,
    )
    .unwrap();
    let out = dir.path().join("run");
    ok(&["experiment", path(&cfg), "--out", path(&out)]);
    let text = fs::read_to_string(out.join("errors.csv")).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("trial,e_opt,e_equ\n"));
}

#[test]
fn schema_violations_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"kernel": "gaussian", "dim": 1, "domain": [[-3, 3]], "n": 3, "objective": "trace", "restart": 4}"#,
    )
    .unwrap();
    let out = optsample(&["experiment", path(&cfg), "--out", path(&dir.path().join("run"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("restart"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    assert_eq!(optsample(&["--help"]).status.code(), Some(0));
    assert_eq!(optsample(&["points", "--kernel", "laplace"]).status.code(), Some(1));
    let non_square = optsample(&[
        "points",
        "--kernel",
        "gaussian",
        "--dim",
        "2",
        "--domain",
        "-2:2,-2:2",
        "--n",
        "5",
        "--objective",
        "trace",
        "--out",
        out,
    ]);
    assert_eq!(non_square.status.code(), Some(1));
    let too_many = optsample(&[
        "oracle",
        "--mode",
        "bruteforce",
        "--kernel",
        "gaussian",
        "--domain",
        "-3:3",
        "--n",
        "10",
        "--objective",
        "trace",
        "--candidates",
        "40",
        "--out",
        out,
    ]);
    assert_eq!(too_many.status.code(), Some(2));
}

#[test]
fn oracle_modes() {
    let dir = tempfile::tempdir().unwrap();
    let exp = dir.path().join("exp");
    ok(&["oracle", "--mode", "exp2pt", "--domain", "0:1", "--grid", "400", "--out", path(&exp)]);
    let report = json(&exp.join("exp2pt.json"));
    assert!(report["gap_steps"].as_f64().unwrap() <= 2.0);

    let brute = dir.path().join("brute");
    let args = [
        "oracle",
        "--mode",
        "bruteforce",
        "--kernel",
        "gaussian",
        "--domain",
        "-3:3",
        "--n",
        "2",
        "--objective",
        "trace",
        "--candidates",
        "8",
        "--greedy",
        "--out",
        path(&brute),
    ];
    ok(&args);
    let report = json(&brute.join("bruteforce.json"));
    assert_eq!(report["optimum"]["indices"], serde_json::json!([2, 5]));
    assert_eq!(report["greedy"]["matches_optimum"], true);

    let profile = dir.path().join("profile");
    ok(&[
        "oracle",
        "--mode",
        "phi-profile",
        "--kernel",
        "gaussian",
        "--domain",
        "-3:3",
        "--at",
        "-1.3,0.2,2.05",
        "--samples",
        "31",
        "--out",
        path(&profile),
    ]);
    let table = rows(&profile.join("phi_profile.csv"));
    for x in [-1.3, 0.2, 2.05] {
        let row = table.iter().find(|r| r[0] == x).expect("sampling point is profiled");
        assert!(row[1].abs() < 1e-7);
    }
    assert!(table.windows(2).all(|w| w[0][0] < w[1][0]));
}
