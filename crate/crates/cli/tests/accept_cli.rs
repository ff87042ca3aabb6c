//! End-to-end behaviour of the `zenocomm` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn zenocomm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zenocomm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Second line of a two-line CSV record, keyed by header name.
fn record(out: &Output) -> Vec<(String, String)> {
    let text = stdout(out);
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from);
    let values = lines.next().unwrap().split(',').map(String::from);
    header.zip(values).collect()
}

fn field(rec: &[(String, String)], key: &str) -> f64 {
    rec.iter().find(|(k, _)| k == key).unwrap().1.parse().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("zenocomm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn analytic_rates() {
    let out = zenocomm(&["analytic", "--M", "25", "--t", "0.001", "--N", "320"]);
    assert!(out.status.success());
    let rec = record(&out);
    assert!((field(&rec, "C0") - 0.987).abs() <= 5e-4);
    assert!((field(&rec, "C1") - 0.9059591594251268).abs() < 1e-11);
    assert!((field(&rec, "slaz_p2") - 0.9054711116395356).abs() < 1e-11);
    assert_eq!(field(&rec, "D_eq_slaz"), 8000.0);
}

#[test]
fn analytic_rejects_zero_cycles() {
    assert_eq!(zenocomm(&["analytic", "--M", "0"]).status.code(), Some(1));
}

#[test]
fn run_clean_pass_reaches_d2() {
    let out = zenocomm(&[
        "run",
        "--protocol",
        "improved",
        "--M",
        "25",
        "--bob",
        "pass",
        "--mask",
        "none",
    ]);
    assert!(out.status.success());
    assert!((field(&record(&out), "D2") - 1.0).abs() < 1e-12);
}

#[test]
fn run_single_obstruction() {
    let out = zenocomm(&[
        "run",
        "--protocol",
        "improved",
        "--M",
        "25",
        "--bob",
        "pass",
        "--mask",
        "13",
        "--c",
        "0",
    ]);
    assert!(out.status.success());
    assert!((field(&record(&out), "D2") - 0.219590402571).abs() < 1e-11);
}

#[test]
fn run_block_sums_to_one() {
    let out = zenocomm(&[
        "run",
        "--protocol",
        "improved",
        "--M",
        "25",
        "--t",
        "0.001",
        "--splitters",
        "3",
        "--bob",
        "block",
        "--c",
        "module",
    ]);
    assert!(out.status.success());
    let rec = record(&out);
    let total: f64 = ["D1", "D2", "D3", "D4", "noise_absorbed"]
        .iter()
        .map(|k| field(&rec, k))
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
    assert!(field(&rec, "D4") > 0.0);
}

#[test]
fn run_baseline_block() {
    let out = zenocomm(&["run", "--protocol", "slaz", "--M", "25", "--N", "320", "--bob", "block"]);
    assert!(out.status.success());
    assert!((field(&record(&out), "D2") - 0.9054711116395356).abs() < 1e-9);
}

#[test]
fn run_argument_errors() {
    let bad_mask = zenocomm(&[
        "run",
        "--protocol",
        "improved",
        "--M",
        "25",
        "--bob",
        "pass",
        "--mask",
        "3,x",
    ]);
    assert_eq!(bad_mask.status.code(), Some(1));
    let out_of_range = zenocomm(&[
        "run",
        "--protocol",
        "improved",
        "--M",
        "5",
        "--bob",
        "pass",
        "--mask",
        "6",
    ]);
    assert_eq!(out_of_range.status.code(), Some(1));
    let bad_protocol = zenocomm(&["run", "--protocol", "bogus", "--M", "5", "--bob", "pass"]);
    assert_eq!(bad_protocol.status.code(), Some(1));
    let missing_n = zenocomm(&["run", "--protocol", "slaz", "--M", "5", "--bob", "pass"]);
    assert_eq!(missing_n.status.code(), Some(1));
    assert_eq!(zenocomm(&["run", "--nonsense"]).status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    let out = zenocomm(&["--help"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("fig4"));
}

#[test]
fn table1_writes_forty_rows() {
    let path = scratch("table1.csv");
    let out = zenocomm(&["table1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 41);
    assert!(text.starts_with("protocol,M,N,t,B,c,trials,seed,value,stderr\n"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("audit"));
}

#[test]
fn table1_json() {
    let out = zenocomm(&["table1", "--format", "json"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with('['));
    assert_eq!(text.matches("\"protocol\"").count(), 40);
}

#[test]
fn fig3_range() {
    let out = zenocomm(&["fig3", "--m-range", "25-30"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1 + 4 * 6);
    assert_eq!(zenocomm(&["fig3", "--m-range", "30-25"]).status.code(), Some(1));
}

#[test]
fn fig4_needs_seed_and_trials() {
    assert_eq!(zenocomm(&["fig4"]).status.code(), Some(1));
    assert_eq!(
        zenocomm(&["fig4", "--seed", "1", "--trials", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(
        zenocomm(&["fig4", "--seed", "1", "--workers", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(
        zenocomm(&["fig4", "--seed", "1", "--B", "0,1.5"]).status.code(),
        Some(1)
    );
}

#[test]
fn fig4_small_grid_is_deterministic() {
    let args = ["fig4", "--seed", "11", "--trials", "300", "--B", "0,0.1,0.5,1"];
    let one = zenocomm(&[&args[..], &["--workers", "1"]].concat());
    let again = zenocomm(&[&args[..], &["--workers", "1"]].concat());
    let many = zenocomm(&[&args[..], &["--workers", "3"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, again.stdout);
    assert_eq!(one.stdout, many.stdout);
    // exact and sampled row for each of 4 protocols at 4 noise rates
    assert_eq!(stdout(&one).lines().count(), 1 + 2 * 4 * 4);
    let other_seed = zenocomm(&["fig4", "--seed", "12", "--trials", "300", "--B", "0,0.1,0.5,1"]);
    assert_ne!(one.stdout, other_seed.stdout);
}

#[test]
fn config_file_with_flag_override() {
    let cfg = scratch("fig4.cfg");
    std::fs::write(&cfg, "# small run\nseed = 5\ntrials = 100\nB = 0, 0.5\nformat = csv\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = stdout(&zenocomm(&["fig4", "--config", cfg]));
    let sampled: Vec<&str> = from_file.lines().filter(|l| l.contains(",100,5,")).collect();
    assert_eq!(sampled.len(), 8);

    let overridden = stdout(&zenocomm(&["fig4", "--config", cfg, "--trials", "50"]));
    assert_eq!(overridden.lines().filter(|l| l.contains(",50,5,")).count(), 8);
    assert_eq!(overridden.lines().filter(|l| l.contains(",100,5,")).count(), 0);
}

#[test]
fn config_file_errors() {
    let cfg = scratch("bad.cfg");
    std::fs::write(&cfg, "speed = 3\n").unwrap();
    assert_eq!(
        zenocomm(&["analytic", "--config", cfg.to_str().unwrap(), "--M", "5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        zenocomm(&["analytic", "--config", "/nonexistent/zeno.cfg", "--M", "5"])
            .status
            .code(),
        Some(1)
    );
}
