use std::path::PathBuf;
use std::process::{Command, Output};

fn warplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warplab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join(rel)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn flat_gaussian_all_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = warplab(&[
        "run",
        "--config",
        &path("scenarios/flat_gaussian.toml"),
        "--suite",
        "all",
        "--out",
        &out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for f in [
        "reports.csv",
        "drift_margins.csv",
        "coupling_distance.csv",
        "provenance.txt",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("reports.csv")).unwrap();
    assert!(csv.starts_with("check_id,scenario,lhs,rhs,margin,ci_low,ci_high,fitted_constants,verdict\n"));
    let prov = std::fs::read_to_string(dir.path().join("provenance.txt")).unwrap();
    assert!(prov.contains("seed: 1") && prov.contains("fitted C2"));
}

#[test]
fn example_measure_confirms_expected_divergence() {
    let o = warplab(&[
        "run",
        "--config",
        &path("scenarios/paper_example.toml"),
        "--suite",
        "measure",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("expected divergence confirmed"), "{text}");
    assert!(!text.contains(" fail "), "{text}");
}

#[test]
fn malformed_config_exits_2() {
    let o = warplab(&["run", "--config", &path("tests/data/malformed.toml"), "--suite", "all"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"));
    let o = warplab(&[
        "run",
        "--config",
        &path("tests/data/invalid_value.toml"),
        "--suite",
        "all",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k must be > 0"));
}

#[test]
fn usage_and_lookup_errors_exit_2() {
    assert_eq!(
        warplab(&["run", "--scenario", "flat_gaussian", "--suite", "bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(warplab(&["run", "--scenario", "nowhere"]).status.code(), Some(2));
    assert_eq!(
        warplab(&["run", "--config", "/nonexistent/x.toml"]).status.code(),
        Some(2)
    );
    assert_eq!(warplab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn list_and_show_scenarios() {
    let o = warplab(&["list-scenarios"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["flat_gaussian", "paper_example", "power_surface"] {
        assert!(text.contains(name));
    }
    let o = warplab(&["show-scenario", "power_surface"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        warplab::parse_config(&stdout(&o)).unwrap(),
        warplab::scenarios::load("power_surface").unwrap()
    );
}

#[test]
fn csv_format_and_seed_override() {
    let o = warplab(&[
        "run",
        "--scenario",
        "flat_gaussian",
        "--suite",
        "curvature",
        "--format",
        "csv",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "check_id,scenario,lhs,rhs,margin,ci_low,ci_high,fitted_constants,verdict"
    );
    assert!(lines.all(|l| l.contains(",flat_gaussian,")));
}

#[test]
fn sweep_crosses_the_thresholds() {
    let o = warplab(&[
        "sweep",
        "--scenario",
        "paper_example",
        "--ratios",
        "0.5,2,3",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let verdict = |id: &str, n: usize| -> String {
        let row = text.lines().filter(|l| l.starts_with(id)).nth(n).unwrap();
        row.rsplit(',').next().unwrap().to_string()
    };
    assert_eq!(verdict("sweep.thm11", 0), "fail");
    assert_eq!(verdict("sweep.lem23", 1), "pass");
    assert_eq!(verdict("sweep.thm11", 2), "pass");
}
