use std::path::Path;
use std::process::{Command, Output};

fn sgfluid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgfluid"))
        .args(args)
        .env_remove("SGFLUID_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL_RUN: &str = r#"
seed = 11
[model]
alpha = 0.1
nu = 0.01
[grid]
nx = 16
ny = 24
[time]
dt = 0.01
t_end = 0.2
record_every = 5
[flow]
name = "random"
amplitude = 0.3
[strip]
rule = "fixed"
width = 0.2
[output]
snapshot = true
"#;

#[test]
fn classify_prints_the_region() {
    let o = sgfluid(&["classify", "--alpha", "0.01", "--nu", "0.0001"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "boundary III/IV");
    let o = sgfluid(&["classify", "--alpha", "0.5", "--nu", "0.5"]);
    assert_eq!(stdout(&o).trim(), "region II");
    assert!(!sgfluid(&["classify", "--alpha", "0", "--nu", "0.1"]).status.success());
}

#[test]
fn oracle_check_passes() {
    let o = sgfluid(&["oracle-check"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 4);
}

#[test]
fn zero_horizon_run_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[model]\nalpha = 0.1\nnu = 0.01\n[grid]\nnx = 16\nny = 24\n[time]\nt_end = 0.0\n[flow]\nname = \"random\"\n");
    let out = dir.path().join("out");
    let o = sgfluid(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(out.join("timeseries.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(2).unwrap().starts_with("0.0,"));
}

#[test]
fn equal_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL_RUN);
    let read = |sub: &str| {
        let out = dir.path().join(sub);
        assert!(sgfluid(&["run", &cfg, "--out", out.to_str().unwrap()]).status.success());
        (
            std::fs::read(out.join("timeseries.csv")).unwrap(),
            std::fs::read(out.join("final.snap")).unwrap(),
        )
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn environment_sets_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SMALL_RUN);
    let o = Command::new(env!("CARGO_BIN_EXE_sgfluid"))
        .args(["run", &cfg])
        .env("SGFLUID_OUT_DIR", dir.path().join("env"))
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("env/timeseries.csv").exists());
}

#[test]
fn resumed_run_ends_where_the_full_run_does() {
    let dir = tempfile::tempdir().unwrap();
    let full = write(dir.path(), "full.toml", SMALL_RUN);
    let half = write(dir.path(), "half.toml", &SMALL_RUN.replace("t_end = 0.2", "t_end = 0.1"));
    let p = |s: &str| dir.path().join(s).to_str().unwrap().to_string();
    assert!(sgfluid(&["run", &full, "--out", &p("full")]).status.success());
    assert!(sgfluid(&["run", &half, "--out", &p("half")]).status.success());
    let o = sgfluid(&["run", &full, "--out", &p("rest"), "--resume", &p("half/final.snap")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let last = |s: &str| {
        let t = std::fs::read_to_string(dir.path().join(s).join("timeseries.csv")).unwrap();
        t.lines().last().unwrap().split(',').map(|v| v.parse::<f64>().unwrap_or(0.0)).collect::<Vec<_>>()
    };
    let (a, b) = (last("full"), last("rest"));
    assert_eq!(a[0], b[0]);
    // energies agree; the dissipation columns restart from zero
    for i in 1..4 {
        assert!((a[i] - b[i]).abs() <= 1e-12 * a[i].abs(), "column {i}: {} vs {}", a[i], b[i]);
    }
}

#[test]
fn sweep_writes_rows_in_plan_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("iv");
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/region-iv.toml");
    let o = sgfluid(&["sweep", cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let alphas: Vec<&str> = text.lines().skip(2).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(alphas, ["0.2", "0.1", "0.05", "0.025"]);
}

#[test]
fn checks_report_and_pass() {
    let o = sgfluid(&["corrector-check"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = sgfluid(&["bench-inequalities", "--count", "20"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.ends_with("PASS")).count(), 6);
}

#[test]
fn failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[grid]\nnx = 16\nnz = 3\n");
    let o = sgfluid(&["run", &bad]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert!(!sgfluid(&["corrector-check", "--deltas", "0.2,0.1"]).status.success());
    assert!(!sgfluid(&["corrector-check", "--profile", "c3"]).status.success());
    assert!(!sgfluid(&["frobnicate"]).status.success());
}
