use std::path::Path;
use std::process::Command;

use finsler_blowup::cli::{self, sweep_instances, RunConfig, SCHEMA_VERSION};

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn run(args: &[&str]) -> i32 {
    cli::run(std::iter::once("finsler-blowup").chain(args.iter().copied()))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn the_committed_example_config_is_valid() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/example.toml");
    let c = RunConfig::load(&path).unwrap();
    let defaults = RunConfig {
        sweep: c.sweep.clone(),
        ..RunConfig::default()
    };
    // The file documents the defaults, plus a sweep grid.
    assert_eq!(c, defaults);
    assert_eq!(sweep_instances(&c).unwrap().len(), 8);
}

#[test]
fn norms_reports_are_seeded_and_versioned() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "norm = { family = \"smoothed_lp\", params = [4, 0.05] }\n[tolerances]\nnorm_samples = 100\n");
    let out = |s: &str| dir.path().join(s).to_str().unwrap().to_string();
    assert_eq!(run(&["norms", "--config", &cfg, "--out", &out("a"), "--seed", "9"]), 0);
    assert_eq!(run(&["norms", "--config", &cfg, "--out", &out("b"), "--seed", "9"]), 0);
    assert_eq!(run(&["--seed", "10", "norms", "--config", &cfg, "--out", &out("c")]), 0);
    let read = |s: &str| std::fs::read(dir.path().join(s).join("norms.json")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
    let v = json(&dir.path().join("a/norms.json"));
    assert_eq!(v["schema_version"], SCHEMA_VERSION);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["tolerance"], 1e-6);
    assert!(v["max_violation"]["euler"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn distance_writes_field_report_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "resolution = 32\nnorm = { family = \"ellipse\", params = [4, 0, 0, 1] }\n");
    let out = dir.path().join("o");
    assert_eq!(run(&["distance", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let v = json(&out.join("eikonal.json"));
    assert_eq!(v["pass"], true);
    assert!(v["oracle_sup_difference"].as_f64().unwrap() <= v["oracle_gate"].as_f64().unwrap());
    let csv = std::fs::read_to_string(out.join("distance.csv")).unwrap();
    assert!(csv.starts_with("x,y,value,residual\n") && !csv.contains('\r'));
    assert!(std::fs::read_to_string(out.join("distance.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn usage_errors_exit_with_two_and_leave_a_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = out.to_str().unwrap();
    let bad = write(dir.path(), "bad.toml", "resolution = [\n");
    assert_eq!(run(&["solve", "--config", &bad, "--out", o]), 2);
    let rec = json(&out.join("failure.json"));
    assert_eq!(rec["kind"], "usage");
    assert_eq!(rec["command"], "solve");

    let dec = write(dir.path(), "dec.toml", "[schedules]\nm = [20, 10]\n");
    assert_eq!(run(&["solve", "--config", &dec, "--out", o]), 2);
    let fast = write(dir.path(), "fast.toml", "resolution = 24\n[problem]\nsource = { c1 = 1.0, beta = 3.5 }\n");
    assert_eq!(run(&["ergodic", "--config", &fast, "--out", o]), 2);
    let missing = dir.path().join("nope.toml");
    assert_eq!(run(&["norms", "--config", missing.to_str().unwrap(), "--out", o]), 2);
    assert_eq!(run(&["sweep", "--out", o]), 2);
    assert_eq!(run(&["bogus"]), 2);
    assert_eq!(run(&["norms", "--workers", "0"]), 2);
}

#[test]
fn solve_reports_the_log_mode_fit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"problem": {"q": 2.0}}"#);
    let out = dir.path().join("o");
    assert_eq!(run(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let v = json(&out.join("fit.json"));
    assert_eq!(v["theory"]["mode"], "logarithmic");
    assert_eq!(v["m_schedule"].as_array().unwrap().last().unwrap(), "inf");
    assert!(v["c0_rel_err"].as_f64().unwrap() <= 0.15);
    assert_eq!(v["checks"]["sandwich"], true);
    let csv = std::fs::read_to_string(out.join("solution.csv")).unwrap();
    assert!(csv.starts_with("x,y,value\n"));
}

#[test]
fn ergodic_without_quadratic_growth_is_continuation_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "resolution = 40\n[schedules]\nlambda = [1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125]\n");
    let out = dir.path().join("o");
    assert_eq!(run(&["ergodic", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let v = json(&out.join("ergodic.json"));
    assert_eq!(v["method"], "continuation");
    assert!(v["rayleigh"].is_null() && v["agreement"].is_null() && v["oracle"].is_null());
    assert_eq!(v["trace"].as_array().unwrap().len(), 6);
    let trace = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 7);
    assert!(out.join("v.csv").is_file() && !out.join("w.csv").exists());
}

#[test]
fn sweep_grid_resume_and_worker_independence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[schedules]\nm = [10, 40]\n[sweep]\nq = [1.5, 2.0]\nnorms = [{ family = \"euclidean\" }]\nresolutions = [56, 60]\n",
    );
    let out = |s: &str| dir.path().join(s);
    let code = run(&["sweep", "--config", &cfg, "--out", out("a").to_str().unwrap(), "--workers", "1"]);
    // q = 1.5 misses the rate gates at these resolutions.
    assert_eq!(code, 1);
    let runs: Vec<_> = std::fs::read_dir(out("a/runs")).unwrap().collect();
    assert_eq!(runs.len(), 4);
    let summary = std::fs::read_to_string(out("a/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
    assert!(summary.lines().skip(1).all(|l| !l.contains(",error,")), "{summary}");

    run(&["sweep", "--config", &cfg, "--out", out("b").to_str().unwrap(), "--workers", "3"]);
    for rel in ["summary.csv", "sweep.json", "runs/003_q2_euclidean_r60/fit.json", "runs/000_q1.5_euclidean_r56/solution.csv"] {
        assert_eq!(std::fs::read(out("a").join(rel)).unwrap(), std::fs::read(out("b").join(rel)).unwrap(), "{rel}");
    }

    // A resumed sweep leaves completed runs untouched.
    let marker = out("a/runs/002_q2_euclidean_r56/solution.csv");
    std::fs::write(&marker, "sentinel").unwrap();
    std::fs::remove_dir_all(out("a/runs/001_q1.5_euclidean_r60")).unwrap();
    run(&["sweep", "--config", &cfg, "--out", out("a").to_str().unwrap(), "--resume"]);
    assert_eq!(std::fs::read_to_string(&marker).unwrap(), "sentinel");
    assert!(out("a/runs/001_q1.5_euclidean_r60/fit.json").is_file());
    assert_eq!(std::fs::read_to_string(out("a/summary.csv")).unwrap(), summary);
}

#[test]
fn the_binary_maps_outcomes_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let exe = env!("CARGO_BIN_EXE_finsler-blowup");
    let status = |args: &[&str]| Command::new(exe).args(args).current_dir(dir.path()).output().unwrap();
    let ok = status(&["norms", "--out", "n"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("norms: pass"));
    assert_eq!(status(&["solve", "--config", "missing.toml"]).status.code(), Some(2));
    assert_eq!(status(&["--help"]).status.code(), Some(0));
    let cfg = write(dir.path(), "c.toml", "[problem]\nq = 1.5\n");
    // The q = 1.5 rate gates fail at the default resolution.
    let failed = status(&["solve", "--config", &cfg, "--out", "s"]);
    assert_eq!(failed.status.code(), Some(1));
    let v = json(&dir.path().join("s/fit.json"));
    assert_eq!(v["passed"], false);
    assert_eq!(v["checks"]["monotone"], true);
}
