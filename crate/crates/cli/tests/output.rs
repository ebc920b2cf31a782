use std::process::Command;

use xband_cli::config::from_assignments;
use xband_cli::output::{format_float, render_table};
use xband_cli::{run, RunOutcome};
use xband_core::harness::{Cell, Table};

#[test]
fn float_format() {
    assert_eq!(format_float(0.0), "0.00000000e0");
    assert_eq!(format_float(-9.1), "-9.10000000e0");
    assert_eq!(format_float(1234.5678912), "1.23456789e3");
    assert_eq!(format_float(f64::NAN), "nan");
    assert_eq!(format_float(f64::NEG_INFINITY), "-inf");
}

#[test]
fn table_layout() {
    let mut t = Table::new("demo", "a demo", &["f", "label"]);
    t.push(vec![Cell::Float(1.5), Cell::Text("a,b".into())]);
    t.push(vec![Cell::Int(-2), Cell::Text("plain".into())]);
    let s = render_table(&t);
    assert_eq!(
        s,
        "# a demo; columns: f, label\nf,label\n1.50000000e0,\"a,b\"\n-2,plain\n"
    );
}

fn run_to(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let cfg = from_assignments(
        &[
            "experiment=interference_strength",
            "trials=50",
            "seed=3",
            &format!("out=\"{}\"", dir.display()),
        ],
        dir,
    )
    .unwrap();
    let outcome = run(&cfg).unwrap();
    assert!(matches!(outcome, RunOutcome::Campaign { .. }));
    assert_eq!(outcome.exit_code(), 0);
    let mut files: Vec<_> = outcome
        .files()
        .iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn same_seed_gives_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let fa = run_to(a.path());
    let fb = run_to(b.path());
    assert_eq!(
        fa.iter().map(|f| f.0.as_str()).collect::<Vec<_>>(),
        vec!["interference_strength.csv", "meta.csv"]
    );
    assert_eq!(fa[0], fb[0]);
    let csv = String::from_utf8(fa[0].1.clone()).unwrap();
    let header = csv.lines().nth(1).unwrap();
    assert!(
        header.starts_with("f,analytic_db,sim_nonfading_db,sim_rayleigh_db"),
        "{header}"
    );
    assert!(!csv.contains('\r'));
    let meta = String::from_utf8(fa[1].1.clone()).unwrap();
    assert!(meta.contains("version,xband "));
    assert!(meta.contains("seed,3"));
}

#[test]
fn binary_reports_bad_keys() {
    let out = Command::new(env!("CARGO_BIN_EXE_xband"))
        .args(["run", "--set", "n_cp=64"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_cp"));
}

#[test]
fn binary_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_xband"))
        .args(["run", "--experiment", "param_sweep", "--seed", "1", "--out"])
        .arg(dir.path())
        .env("XBAND_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("meta.csv").exists());
}
