use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn jaest(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jaest"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Writes a small synthetic curve and a matching configuration into `dir`.
fn setup(dir: &Path) -> PathBuf {
    let o = jaest(
        &["synth", "--samples-per-period", "100", "--ms", "1.52e6", "--noise", "0.005", "--seed", "3", "--output", "data", "--name", "curve"],
        dir,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let o = jaest(&["template", "--algorithm", "pso"], dir);
    assert!(o.status.success());
    let config = stdout(&o)
        .replace("data = \"curve.csv\"", "data = \"data/curve.csv\"")
        .replace("restarts = 50", "restarts = 5")
        .replace("it_max = 10000", "it_max = 40");
    assert!(config.contains("it_max = 40"), "{config}");
    let path = dir.join("exp.toml");
    std::fs::write(&path, config).unwrap();
    path
}

fn report_paths(o: &Output) -> PathBuf {
    PathBuf::from(stdout(o).lines().last().unwrap().trim())
}

/// Report JSON with the wall-clock dependent fields removed.
fn without_clock(v: &mut Value) {
    let obj = v.as_object_mut().unwrap();
    obj.remove("generated_at");
    obj.remove("time");
    obj["best_run"].as_object_mut().unwrap().remove("time_s");
    for r in obj["records"].as_array_mut().unwrap() {
        r.as_object_mut().unwrap().remove("time_s");
    }
}

#[test]
fn repeated_experiment_reports_match_except_for_clock_fields() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path());
    let first = jaest(&["experiment", "--config", "exp.toml", "--seed", "42"], dir.path());
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(stdout(&first).contains("Max. Likelihood"));
    assert!(stderr(&first).contains("restart 5/5"));
    let second = jaest(&["experiment", "--config", "exp.toml", "--seed", "42", "--quiet"], dir.path());
    assert!(second.status.success(), "{}", stderr(&second));

    let (p1, p2) = (report_paths(&first), report_paths(&second));
    assert_ne!(p1, p2, "second run must not replace the first report");
    assert!(p1.ends_with("A-pso-uniform-seed42.json"), "{}", p1.display());
    assert!(p2.ends_with("A-pso-uniform-seed42.1.json"), "{}", p2.display());
    let read = |p: &Path| -> Value { serde_json::from_str(&std::fs::read_to_string(dir.path().join(p)).unwrap()).unwrap() };
    let (mut a, mut b) = (read(&p1), read(&p2));
    without_clock(&mut a);
    without_clock(&mut b);
    assert_eq!(a, b);
    assert!(dir.path().join("results/A-pso-uniform-seed42.error_density.csv").exists());
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path());
    let run = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_jaest"))
            .args(["experiment", "--config", "exp.toml", "--algorithm", "de", "--quiet"])
            .env("RAYON_NUM_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        let mut v: Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join(report_paths(&o))).unwrap()).unwrap();
        without_clock(&mut v);
        v["records"].clone()
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn stats_reproduces_the_embedded_statistics() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path());
    let o = jaest(&["experiment", "--config", "exp.toml", "--quiet"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let path = report_paths(&o);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join(&path)).unwrap()).unwrap();
    let s = jaest(&["stats", path.to_str().unwrap(), "--json"], dir.path());
    assert!(s.status.success(), "{}", stderr(&s));
    let stats: Value = serde_json::from_str(&stdout(&s)).unwrap();
    assert_eq!(stats["error"], report["error"]["stats"]);
    assert_eq!(stats["time"], report["time"]["stats"]);
    let table = jaest(&["stats", path.to_str().unwrap()], dir.path());
    for row in ["Best Case", "Worst Case", "Max. Likelihood", "95% Lower", "95% Upper"] {
        assert!(stdout(&table).contains(row), "{row}");
    }
}

#[test]
fn missing_data_file_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = jaest(&["fit", "--data", "nowhere/curve.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nowhere/curve.csv"), "{}", stderr(&o));
}

#[test]
fn malformed_data_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "H,B\n0,0\nabc,1\n2,3\n").unwrap();
    let o = jaest(&["fit", "--data", "bad.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(jaest(&["experiment", "--restarts", "many"], dir.path()).status.code(), Some(1));
    assert_eq!(jaest(&["no-such-command"], dir.path()).status.code(), Some(1));
    assert_eq!(jaest(&["fit"], dir.path()).status.code(), Some(1));
    assert_eq!(jaest(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn simulation_failure_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    // a coarse field step overshoots saturation
    let o = jaest(&["simulate", "--amplitude", "1e4", "--a", "1", "--k", "1", "--samples-per-period", "10"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("simulation failed"));
    // invalid parameters are an input problem
    let o = jaest(&["simulate", "--c", "1.5"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn simulate_writes_a_loop_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let o = jaest(&["simulate", "--samples-per-period", "200"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("H,B"));
    assert_eq!(lines.count(), 200);
}

#[test]
fn fit_and_brute_force_run_on_a_synthetic_curve() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path());
    let o = jaest(&["fit", "--config", "exp.toml", "--init", "gaussian", "--center", "1.52e6,13,1e-5,0.8,24", "--sigma", "0.01"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(report_paths(&o).to_string_lossy().ends_with(".fit.json"));
    let o = jaest(&["brute-force", "--config", "exp.toml", "--points", "3"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("evaluations 81"), "{}", stdout(&o));
}
