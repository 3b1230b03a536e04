//! End-to-end runs of the command-line interface.

use std::path::PathBuf;
use std::process::Command;

use seqselect::cli::{run_with_args, EXIT_CONFIG, EXIT_FAILED, EXIT_OK};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("seqselect").chain(args.iter().copied());
    let code = run_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("seqselect-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    let _ = std::fs::remove_file(&path);
    path
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn table_small_values() {
    let (code, out, _) = run(&["table", "--n-max", "10"]);
    assert_eq!(code, EXIT_OK);
    let s = column(&out, "s");
    let want = [1.0, 1.5, 2.0, 2.375, 2.725, 3.046, 3.333, 3.601, 3.857, 4.098];
    for (got, want) in s.iter().zip(want) {
        assert!((got - want).abs() < 5e-4, "{got} vs {want}");
    }
    assert_eq!(column(&out, "kstar")[..3], [0.0, 1.0, 2.0]);
}

#[test]
fn table_single_row() {
    let (code, out, _) = run(&["table", "--n", "1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 2);
    assert!(out.lines().nth(1).unwrap().starts_with("1,1.0000000000000000e0,0,"));
}

#[test]
fn table_exact_agrees_with_float() {
    let (_, float, _) = run(&["table", "--n-max", "200"]);
    let (code, exact, _) = run(&["table", "--n-max", "200", "--mode", "exact-rational"]);
    assert_eq!(code, EXIT_OK);
    for (a, b) in column(&float, "s").iter().zip(column(&exact, "s")) {
        assert!((a - b).abs() <= 1e-10);
    }
}

#[test]
fn table_needs_size_and_respects_exact_cap() {
    assert_eq!(run(&["table"]).0, EXIT_CONFIG);
    assert_eq!(run(&["table", "--n-max", "0"]).0, EXIT_CONFIG);
    let (code, _, err) = run(&["table", "--n-max", "5000", "--mode", "exact-rational"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(!err.is_empty());
    assert_eq!(run(&["table", "--format", "xml", "--n-max", "3"]).0, EXIT_CONFIG);
}

#[test]
fn crossover_points() {
    let (code, out, _) = run(&["crossover"]);
    assert_eq!((code, out.trim()), (EXIT_OK, "175"));
    let (code, out, _) = run(&["crossover", "--with-f"]);
    assert_eq!((code, out.trim()), (EXIT_OK, "2"));
    // too short a range never crosses
    assert_eq!(run(&["crossover", "--n-max", "100"]).0, EXIT_FAILED);
}

#[test]
fn kstar_in_window() {
    let (code, out, err) = run(&["kstar", "--n-max", "20000"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.starts_with("n,kstar_f,x_n,r_n,kstar_dp,in_window\n"));
    assert!(out.lines().skip(1).all(|l| l.ends_with(",true")));
    assert_eq!(run(&["kstar", "--n-max", "1"]).0, EXIT_CONFIG);
}

#[test]
fn residuals_and_defect() {
    let (code, out, err) = run(&["residuals", "--n-max", "100000"]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("all negative: true"));
    assert!(column(&out, "residual").iter().all(|&r| r < 0.0));
    let (code, _, err) = run(&["defect", "--n-max", "1000"]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("B estimate 0.4575"), "{err}");
}

#[test]
fn compare_lemmas_bracket() {
    let (code, out, _) = run(&["compare-lemmas", "--n-max", "20000", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["conclusion_violations"].as_array().unwrap().len(), 0);
    assert!(v["upper_hypothesis_failures"].as_array().unwrap().is_empty());
}

#[test]
fn monte_carlo_commands_emit_reports() {
    for (cmd, policy) in [("simulate", "optimal"), ("reduce", "reduction"), ("lis", "offline-lis")] {
        let (code, out, _) = run(&[cmd, "--n", "50", "--replicates", "500", "--seed", "3", "--grid-size", "200"]);
        assert_eq!(code, EXIT_OK, "{cmd}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["policy"], policy);
        assert_eq!(v["replicates"], 500);
        assert!(v["mean"].as_f64().unwrap() > 1.0);
        // same seed, same numbers
        assert_eq!(run(&[cmd, "--n", "50", "--replicates", "500", "--seed", "3", "--grid-size", "200"]).1, out);
    }
    assert_eq!(run(&["simulate", "--replicates", "0"]).0, EXIT_CONFIG);
}

#[test]
fn simulate_trace_file() {
    let path = scratch("trace.csv");
    let (code, _, _) = run(&["simulate", "--n", "30", "--replicates", "10", "--trace", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&path).unwrap();
    let values = column(&text, "value");
    assert!(!values.is_empty());
    assert!(values.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn iid_summary_and_grid_export() {
    let grid = scratch("grid.csv");
    let (code, out, _) = run(&["iid", "--n", "20", "--grid-size", "200", "--export-grid", grid.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let shat = column(&out, "shat");
    assert_eq!(shat.len(), 20);
    assert!((shat[0] - 1.0).abs() < 1e-12);
    assert!(shat.windows(2).all(|w| w[0] < w[1]));
    let text = std::fs::read_to_string(&grid).unwrap();
    assert_eq!(text.lines().count(), 1 + 21 * 201);
    let (_, out, _) = run(&["iid", "--n", "5", "--grid-size", "200", "--exploratory"]);
    assert!(out.starts_with("n,shat,err_bar,c_ratio\n"));
    assert_eq!(run(&["iid", "--n", "5", "--grid-size", "10"]).0, EXIT_CONFIG);
}

#[test]
fn cache_round_trip_and_corruption() {
    for compress in [false, true] {
        let path = scratch(if compress { "cache.csv.gz" } else { "cache.csv" });
        let p = path.to_str().unwrap();
        let mut args = vec!["table", "--n-max", "300", "--cache", p];
        if compress {
            args.push("--compress");
        }
        let (code, first, err) = run(&args);
        assert_eq!(code, EXIT_OK);
        assert!(err.contains("wrote table"));
        let (code, second, err) = run(&["table", "--n-max", "200", "--cache", p]);
        assert_eq!(code, EXIT_OK);
        assert!(err.contains("loaded table"), "{err}");
        assert!(first.starts_with(&second[..second.len() - 1]));
    }
    let bad = scratch("bad.csv");
    std::fs::write(&bad, "# seqselect value-table\nn,s,kstar\n0,0,0\n1,1.5,0\n").unwrap();
    let (code, _, err) = run(&["table", "--n-max", "1", "--cache", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAILED);
    assert!(!err.is_empty());
}

#[test]
fn output_file() {
    let path = scratch("table.csv");
    let (code, out, _) = run(&["table", "--n-max", "5", "-o", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 6);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_seqselect");
    let ok = Command::new(bin).args(["crossover"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).trim(), "175");
    let bad = Command::new(bin).args(["table", "--n-max", "0"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_CONFIG));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(EXIT_OK));
    for cmd in ["table", "crossover", "kstar", "residuals", "compare-lemmas", "simulate", "reduce", "iid", "lis", "defect"] {
        assert!(String::from_utf8_lossy(&help.stdout).contains(cmd), "{cmd}");
    }
}
