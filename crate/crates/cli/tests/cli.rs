use std::path::Path;
use std::process::{Command, Output};

use fcns_core::harness::{make_initial, InitKind, Report, StateFile};
use fcns_core::Grid;

fn fcns(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcns"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn plane_run_writes_outputs_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = fcns(
        &["linear", "--beta", "0.75", "--s1", "0,1", "--out", "r2"],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("PASS lam2_1"));
    let csv = std::fs::read_to_string(dir.path().join("r2/trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,"));

    let again = fcns(&["report", "r2/report.json"], dir.path());
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(stdout(&again), stdout(&o));
}

#[test]
fn report_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = fcns(&["linear", "--out", "run"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let path = dir.path().join("run/report.json");
    let mut report = Report::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();

    // Move the target rate away from the fit and record the failure.
    for fit in &mut report.fits {
        fit.theory_exponent += 1.0;
        fit.verdict = fcns_core::harness::Verdict::Fail;
    }
    std::fs::write(dir.path().join("fail.json"), report.to_json().unwrap()).unwrap();
    let o = fcns(&["report", "fail.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));

    std::fs::write(dir.path().join("garbage.json"), "{\"fits\": 3}").unwrap();
    assert_eq!(
        fcns(&["report", "garbage.json"], dir.path()).status.code(),
        Some(2)
    );
}

#[test]
fn torus_run_with_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = fcns(
        &[
            "linear",
            "--mode",
            "linear-torus",
            "--n",
            "64",
            "--box-len",
            "200",
            "--t-end",
            "50",
            "--c2",
            "10",
            "--out",
            "torus",
        ],
        dir.path(),
    );
    assert!(o.status.code() == Some(0) || o.status.code() == Some(1));
    assert!(dir.path().join("torus/report.json").exists());
}

#[test]
fn norms_of_a_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new(32, 20.0).unwrap();
    let s = make_initial(InitKind::GaussianBump, 0.5, 1.0, &g, 0).unwrap();
    let file = StateFile::from_state(&s);
    std::fs::write(
        dir.path().join("state.json"),
        serde_json::to_string(&file).unwrap(),
    )
    .unwrap();
    let o = fcns(&["norms", "state.json", "--s1", "0,1"], dir.path());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let map: serde_json::Map<String, serde_json::Value> =
        serde_json::from_str(&stdout(&o)).unwrap();
    let l2 = map["L2_a"].as_f64().unwrap();
    assert!((l2 - s.a.l2_norm()).abs() <= 1e-14 * l2);
    assert!(map.contains_key("lam_1") && map.contains_key("besov_minus1"));
}

#[test]
fn bad_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), "{\"bogus\": 1}").unwrap();
    let o = fcns(&["simulate", "--config", "cfg.json"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));

    let o = fcns(&["linear", "--beta", "1.5"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let o = fcns(&["simulate", "--n", "100", "--t-end", "1"], dir.path());
    assert_eq!(o.status.code(), Some(3));
}
