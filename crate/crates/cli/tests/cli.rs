//! End-to-end tests driving the built binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hcd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcd"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hcd-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn simulate_writes_csv_and_truth_with_expected_shape() {
    let dir = tempdir("simulate");
    let out = hcd(
        &[
            "simulate",
            "--structure",
            "fork",
            "--noise",
            "uniform",
            "--seed",
            "0",
            "--T",
            "1000",
            "--out",
            "fork",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = std::fs::read_to_string(dir.join("fork.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "X,Y,Z");
    assert_eq!(lines.count(), 1000);

    let truth = std::fs::read_to_string(dir.join("fork.truth.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&truth).unwrap();
    assert_eq!(v["type"], "scg");
    assert!(dir.join("fork.truth-wcg.json").exists());
}

#[test]
fn simulate_is_byte_identical_across_invocations() {
    let dir = tempdir("determinism");
    for name in ["a", "b"] {
        let out = hcd(
            &[
                "simulate",
                "--structure",
                "diamond",
                "--seed",
                "7",
                "--T",
                "400",
                "--out",
                name,
            ],
            &dir,
        );
        assert!(out.status.success());
    }
    let a = std::fs::read(dir.join("a.csv")).unwrap();
    let b = std::fs::read(dir.join("b.csv")).unwrap();
    assert_eq!(a, b);
    let a = std::fs::read(dir.join("a.truth.json")).unwrap();
    let b = std::fs::read(dir.join("b.truth.json")).unwrap();
    assert_eq!(a, b);

    // The config sidecar replays the identical dataset.
    let replay = hcd(&["simulate", "--config", "a.config", "--out", "c"], &dir);
    assert!(
        replay.status.success(),
        "{}",
        String::from_utf8_lossy(&replay.stderr)
    );
    let a = std::fs::read(dir.join("a.csv")).unwrap();
    let c = std::fs::read(dir.join("c.csv")).unwrap();
    assert_eq!(a, c);
}

#[test]
fn simulate_ricker_writes_bidirected_truth() {
    let dir = tempdir("ricker");
    let out = hcd(
        &[
            "simulate",
            "--structure",
            "ricker",
            "--species",
            "5",
            "--seed",
            "1",
            "--out",
            "rick",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.join("rick.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 5);

    let truth: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("rick.truth.json")).unwrap())
            .unwrap();
    let edges = truth["edges"].as_array().unwrap();
    assert!(!edges.is_empty());
    // Every link must appear in both directions.
    for e in edges {
        let (src, dst) = (e["src"].as_str().unwrap(), e["dst"].as_str().unwrap());
        assert!(edges.iter().any(|f| f["src"] == dst && f["dst"] == src));
    }
}

#[test]
fn discover_then_evaluate_scores_reasonably() {
    let dir = tempdir("discover");
    assert!(hcd(
        &[
            "simulate",
            "--structure",
            "fork",
            "--noise",
            "uniform",
            "--seed",
            "0",
            "--T",
            "1000",
            "--out",
            "fork"
        ],
        &dir
    )
    .status
    .success());

    let out = hcd(
        &[
            "discover",
            "--input",
            "fork.csv",
            "--method",
            "nbcb-w",
            "--gamma",
            "5",
            "--alpha",
            "0.05",
            "--out",
            "result.json",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let result: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("result.json")).unwrap()).unwrap();
    assert_eq!(result["scg"]["type"], "scg");
    assert!(result["diagnostics"]["ci_tests"].as_u64().unwrap() > 0);

    let eval = hcd(
        &[
            "evaluate",
            "--pred",
            "result.json",
            "--truth",
            "fork.truth.json",
        ],
        &dir,
    );
    assert!(eval.status.success());
    let stdout = String::from_utf8_lossy(&eval.stdout);
    let f1: f64 = stdout
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(3)
        .unwrap()
        .parse()
        .unwrap();
    assert!(f1 >= 0.5, "end-to-end f1 {f1}");
}

#[test]
fn single_column_dataset_discovers_no_cross_edges() {
    let dir = tempdir("single");
    let mut csv = String::from("only\n");
    let mut v = 0.3f64;
    for i in 0..400 {
        v = 0.8 * v + 0.1 * ((i * 37 % 97) as f64 / 97.0 - 0.5);
        csv.push_str(&format!("{v}\n"));
    }
    std::fs::write(dir.join("one.csv"), csv).unwrap();
    let out = hcd(
        &[
            "discover", "--input", "one.csv", "--method", "nbcb-w", "--gamma", "3", "--out",
            "r.json",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let result: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("r.json")).unwrap()).unwrap();
    let edges = result["scg"]["edges"].as_array().unwrap();
    assert!(edges.is_empty());
    assert!(result["scg"]["self_loops"].as_array().unwrap().len() <= 1);
}

#[test]
fn constant_column_exits_with_numerical_code() {
    let dir = tempdir("degenerate");
    let mut csv = String::from("a,flat\n");
    for i in 0..200 {
        csv.push_str(&format!("{},3.5\n", (i as f64).sin()));
    }
    std::fs::write(dir.join("flat.csv"), csv).unwrap();
    let out = hcd(
        &[
            "discover", "--input", "flat.csv", "--method", "cbnb-w", "--out", "r.json",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("flat"), "error must name the variable: {err}");
}

#[test]
fn malformed_csv_reports_location_and_exits_3() {
    let dir = tempdir("malformed");
    std::fs::write(dir.join("bad.csv"), "a,b\n1.0,2.0\n3.0,oops\n").unwrap();
    let out = hcd(
        &[
            "discover", "--input", "bad.csv", "--method", "nbcb-w", "--out", "r.json",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("column 2"), "{err}");
}

#[test]
fn unknown_method_is_a_usage_error() {
    let dir = tempdir("usage");
    std::fs::write(dir.join("x.csv"), "a\n1\n2\n").unwrap();
    let out = hcd(
        &[
            "discover",
            "--input",
            "x.csv",
            "--method",
            "pc-stable",
            "--out",
            "r.json",
        ],
        &dir,
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_single_seed_has_zero_sd_and_writes_csv() {
    let dir = tempdir("bench");
    let out = hcd(
        &[
            "bench",
            "--methods",
            "nbcb-w",
            "--structures",
            "fork",
            "--noise",
            "uniform",
            "--seeds",
            "1",
            "--T",
            "400",
            "--gamma",
            "2",
            "--jobs",
            "1",
            "--out",
            "report.csv",
        ],
        &dir,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    let mut lines = report.lines();
    assert_eq!(
        lines.next().unwrap(),
        "method,structure,noise,n,mean_f1,sd_f1,seconds"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..4], &["nbcb-w", "fork", "uniform", "1"]);
    assert_eq!(row[5], "0.0000");
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempdir("config");
    std::fs::write(
        dir.join("run.conf"),
        "structures = fork\nmethods = nbcb-w\nseeds = 1\nT = 300\ngamma = 2\n",
    )
    .unwrap();
    let out = hcd(&["bench", "--config", "run.conf", "--jobs", "1"], &dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("fork"));
    assert!(stdout.contains(" 1 "), "seed count from config: {stdout}");
}
