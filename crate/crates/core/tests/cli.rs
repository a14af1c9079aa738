use std::path::Path;
use std::process::{Command, Output};
use vnfplace::solver::file::SolutionFile;
use vnfplace::Scenario;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_vnfplace"));
    c.env_remove("ORCH_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn generate(dir: &Path, seed: u64, uavs: usize, name: &str) -> String {
    let out = p(dir, name);
    let r = run(&["generate", "--seed", &seed.to_string(), "--profile", "desk", "--uavs", &uavs.to_string(), "--out", &out]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    out
}

#[test]
fn generate_solve_validate_pipeline() {
    let d = tempfile::tempdir().unwrap();
    let scen = generate(d.path(), 7, 4, "s.json");
    let sol = p(d.path(), "sol.json");
    let r = run(&["solve", "--scenario", &scen, "--k-paths", "8", "--time-limit", "60", "--out", &sol]);
    assert_eq!(r.status.code(), Some(0));
    let file = SolutionFile::from_json(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    assert_eq!(file.status, vnfplace::SolveStatus::Optimal);
    assert_eq!(run(&["validate", "--scenario", &scen, "--solution", &sol]).status.code(), Some(0));

    let r = run(&["solve", "--scenario", &scen, "--k-paths", "inf", "--parallel", "--out", &p(d.path(), "sol2.json")]);
    assert_eq!(r.status.code(), Some(0));
    let r = run(&["solve", "--scenario", &scen, "--mode", "brute-force", "--out", &p(d.path(), "sol3.json")]);
    assert_eq!(r.status.code(), Some(3), "desk instances exceed the brute-force guard rails");
}

#[test]
fn tampered_solution_fails_validation() {
    let d = tempfile::tempdir().unwrap();
    let scen = generate(d.path(), 7, 3, "s.json");
    let sol = p(d.path(), "sol.json");
    run(&["solve", "--scenario", &scen, "--out", &sol]);
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    v["uavs"][0]["assignments"].as_array_mut().unwrap().clear();
    std::fs::write(&sol, v.to_string()).unwrap();
    let r = run(&["validate", "--scenario", &scen, "--solution", &sol]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stdout).contains("C4"));
}

#[test]
fn validate_accepts_variable_maps() {
    let d = tempfile::tempdir().unwrap();
    let scen_path = generate(d.path(), 3, 2, "s.json");
    let sol = p(d.path(), "sol.json");
    run(&["solve", "--scenario", &scen_path, "--out", &sol]);
    let scenario = Scenario::from_json(&std::fs::read_to_string(&scen_path).unwrap()).unwrap();
    let problem = vnfplace::PlacementProblem::assemble_lenient(&scenario, Some(1), vnfplace::Execution::Sequential).unwrap();
    let solution = SolutionFile::from_json(&std::fs::read_to_string(&sol).unwrap()).unwrap().to_solution(&problem).unwrap();
    let vars = vnfplace::model::lp::solution_variables(&solution);
    let map = p(d.path(), "vars.json");
    std::fs::write(&map, serde_json::to_string(&vars).unwrap()).unwrap();
    assert_eq!(run(&["validate", "--scenario", &scen_path, "--solution", &map]).status.code(), Some(0));
    std::fs::write(&map, "{}").unwrap();
    assert_eq!(run(&["validate", "--scenario", &scen_path, "--solution", &map]).status.code(), Some(1));
}

#[test]
fn infeasible_scenario_exits_one_with_witness() {
    let d = tempfile::tempdir().unwrap();
    let scen = generate(d.path(), 5, 2, "s.json");
    let mut s = Scenario::from_json(&std::fs::read_to_string(&scen).unwrap()).unwrap();
    s.uavs[1].demand.latency_ms = 0.1;
    std::fs::write(&scen, s.to_json()).unwrap();
    let r = run(&["solve", "--scenario", &scen, "--out", &p(d.path(), "sol.json")]);
    assert_eq!(r.status.code(), Some(1));
    let access = s.uavs[1].plan.trajectory[0].access;
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert!(stdout.contains(&format!("uav 1 at access {access}")), "{stdout}");
}

#[test]
fn usage_errors_exit_two() {
    let r = run(&["solve", "--bogus"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("Usage"));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["generate", "--seed", "1", "--profile", "huge", "--uavs", "2", "--out", "x"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--scenario", "x", "--k-paths", "0", "--out", "y"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_input_is_an_internal_error() {
    let d = tempfile::tempdir().unwrap();
    let r = run(&["solve", "--scenario", &p(d.path(), "nope.json"), "--out", &p(d.path(), "o.json")]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn seed_environment_overrides_flag() {
    let d = tempfile::tempdir().unwrap();
    let direct = generate(d.path(), 7, 3, "direct.json");
    let env = p(d.path(), "env.json");
    let r = bin()
        .env("ORCH_SEED", "7")
        .args(["generate", "--seed", "1", "--profile", "desk", "--uavs", "3", "--out", &env])
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(std::fs::read(&direct).unwrap(), std::fs::read(&env).unwrap());
    let r = bin().env("ORCH_SEED", "seven").args(["generate", "--seed", "1", "--profile", "desk", "--uavs", "3", "--out", &env]).output().unwrap();
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn export_lp_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let scen = generate(d.path(), 2, 2, "s.json");
    let (a, b) = (p(d.path(), "a.lp"), p(d.path(), "b.lp"));
    assert_eq!(run(&["export-lp", "--scenario", &scen, "--out", &a]).status.code(), Some(0));
    assert_eq!(run(&["export-lp", "--scenario", &scen, "--out", &b]).status.code(), Some(0));
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("Minimize") && text.ends_with("End\n"));
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
}

#[test]
fn experiment_writes_suite_and_summary() {
    let d = tempfile::tempdir().unwrap();
    let out = p(d.path(), "exp");
    let r = run(&["experiment", "--suite", "cost_vs_uavs", "--seeds", "3", "--out-dir", &out, "--sweep", "2,4"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let rows = std::fs::read_to_string(Path::new(&out).join("cost_vs_uavs.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 6);
    assert!(Path::new(&out).join("summary.csv").exists());
    assert_eq!(run(&["experiment", "--suite", "fig9", "--seeds", "3", "--out-dir", &out]).status.code(), Some(2));
    assert_eq!(run(&["experiment", "--suite", "cost_vs_uavs", "--seeds", "0", "--out-dir", &out]).status.code(), Some(2));
}

#[test]
fn run_function_reports_exit_codes() {
    assert_eq!(vnfplace::cli::run(["vnfplace", "--version"]), 0);
    assert_eq!(vnfplace::cli::run(["vnfplace", "frobnicate"]), 2);
}
