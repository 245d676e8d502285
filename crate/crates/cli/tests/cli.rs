use std::path::PathBuf;
use std::process::{Command, Output};

use spacelike_cli::suite::ResidualReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_h2r1"))
}

fn spec(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> ResidualReport {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

#[test]
fn slice_passes_everything_exactly() {
    let out = run(&["verify", &spec("slice.spec"), "--grid", "20x20"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r.pass);
    assert_eq!(r.grid.len(), 400);
    for e in &r.identities {
        assert!(e.max <= 1e-12, "{}: {}", e.id, e.max);
    }
}

#[test]
fn analytic_graph_passes_default_tolerance() {
    let out = run(&["verify", &spec("sinh_cos.spec"), "--c", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!(r.identities.iter().all(|e| e.tolerance == 1e-8 || e.id == "theta"));
}

#[test]
fn non_spacelike_spec_exits_two_with_point() {
    let out = run(&["verify", &spec("steep.spec")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not spacelike at ("), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "/nonexistent.spec"]).status.code(), Some(2));
    assert_eq!(run(&["verify", &spec("slice.spec"), "--tol", "nope=1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", &spec("slice.spec"), "--c", "1", "--constant-k", "-0.5"]).status.code(), Some(2));
    assert_eq!(run(&["verify", &spec("slice.spec"), "--c", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["scan", &spec("slice.spec"), "--quantity", "volume"]).status.code(), Some(2));
}

#[test]
fn tolerance_override_can_fail_the_suite() {
    let out = run(&["verify", &spec("sinh_cos.spec"), "--tol", "eq4=0"]);
    let r = report(&out);
    let e = r.entry("eq4").unwrap();
    assert_eq!(e.tolerance, 0.0);
    assert_eq!(out.status.code(), Some(if r.pass { 0 } else { 1 }));
    assert_eq!(e.pass, e.max == 0.0);
}

#[test]
fn claim_patch_fails_only_the_k_minus_one_bound() {
    let out = run(&["verify", &spec("rot_claim.spec"), "--constant-k", "-0.5", "--grid", "8x8"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert!(r.ode_backed);
    assert_eq!(r.c, 2.0);
    let failed: Vec<&str> = r.failures().map(|e| e.id.as_str()).collect();
    assert_eq!(failed, ["eq19"]);
    assert!(r.entry("ktilde_range").unwrap().pass);
}

#[test]
fn inconsistent_constant_k_skips_pair_checks() {
    let out = run(&["verify", &spec("sinh_cos.spec"), "--constant-k", "-0.5", "--grid", "5x5"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert!(!r.entry("constant_k").unwrap().pass);
    assert!(r.entry("claim_kpair").is_none());
    assert!(!r.notes.is_empty());
}

#[test]
fn report_rows_satisfy_row_invariants() {
    let out = run(&["report", &spec("sinh_cos.spec"), "--grid", "6x5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "u,v,Theta,K,normgradh2,detA,Ktilde16,Ktilde18");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 30);
    for row in &rows {
        assert!((row[4] - (row[2] * row[2] - 1.0)).abs() <= 1e-9);
        assert!((row[6] - row[7]).abs() <= 1e-9);
    }
    let slice = run(&["report", &spec("slice.spec"), "--grid", "4x4"]);
    let text = String::from_utf8(slice.stdout).unwrap();
    for l in text.lines().skip(1) {
        let row: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(row[2], -1.0);
        assert!((row[3] + 1.0).abs() <= 1e-12);
    }
}

#[test]
fn report_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run(&["report", &spec("sinh_cos.spec"), "--grid", "3x3", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let table: spacelike_cli::fields::FieldTable = serde_json::from_str(&text).unwrap();
    assert_eq!(table.to_json(), text);
}

#[test]
fn verify_report_round_trips_losslessly() {
    let out = run(&["verify", &spec("rot_claim.spec"), "--constant-k", "-0.5", "--grid", "4x4"]);
    let r = report(&out);
    let again = serde_json::to_string_pretty(&r).unwrap() + "\n";
    assert_eq!(again.as_bytes(), out.stdout.as_slice());
}

#[test]
fn rotsurf_writes_profile_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("axis.csv");
    let out = run(&["rotsurf", "--K", "-1.5", "--axis", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("r,h,dh,K_check\n"));
    let diag: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("axis.csv.json")).unwrap()).unwrap();
    assert_eq!(diag["r_last"].as_f64(), Some(5.0));
    assert!(diag["K_error_max"].as_f64().unwrap() <= 1e-6);
    assert!(diag["breakdown_radius"].is_null());

    let bad = run(&["rotsurf", "--K", "-0.5", "--axis", "--out", csv.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("det A"));

    let ann = dir.path().join("ann.csv");
    let out = run(&["rotsurf", "--K", "-0.5", "--annulus", "1", "0", "0.2", "--out", ann.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let diag: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ann.csv.json")).unwrap()).unwrap();
    assert!(diag["breakdown_radius"].as_f64().unwrap() < 1.2);
    assert!(diag["radial_length"].as_f64().unwrap() < 1.0);
}

#[test]
fn scan_reports_bounds() {
    let out = run(&["scan", &spec("rot_claim.spec"), "--quantity", "kpair", "--constant-k", "-0.5", "--grid", "8x8"]);
    assert_eq!(out.status.code(), Some(0));
    let s: spacelike_cli::fields::ScanSummary = serde_json::from_slice(&out.stdout).unwrap();
    assert!((s.inf + 0.5).abs() <= 1e-6 && (s.sup + 0.5).abs() <= 1e-6);
    assert_eq!(s.degenerate_points, Some(0));

    let out = run(&["scan", &spec("rot_claim.spec"), "--quantity", "ktilde", "--constant-k", "-0.5", "--grid", "8x8"]);
    assert_eq!(out.status.code(), Some(1));
    let s: spacelike_cli::fields::ScanSummary = serde_json::from_slice(&out.stdout).unwrap();
    let holds = |stmt: &str| s.bounds.iter().find(|b| b.statement == stmt).unwrap().holds;
    assert!(!holds("sup K~ <= K - 1"));
    assert!(holds("inf K~ >= K - 1"));
    assert!(holds("sup K~ < -(K + 1)"));
    assert!(s.inf_abs >= 0.5);
}

#[test]
fn output_is_independent_of_thread_count() {
    let path = spec("sinh_cos.spec");
    let args = ["verify", path.as_str(), "--grid", "9x7"];
    let one = bin().args(args).args(["--threads", "1"]).output().unwrap();
    let four = bin().args(args).args(["--threads", "4"]).output().unwrap();
    let env = bin().args(args).env("THREADS", "3").output().unwrap();
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, env.stdout);
}
