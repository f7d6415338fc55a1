use std::path::Path;
use std::process::{Command, Output};

use gevrey_flow_cli::read_field_dump;
use serde_json::Value;

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_gevrey-flow"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir)
        .env_remove("GEVREY_FLOW_THREADS")
        .output()
        .unwrap()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const SMALL: &str = "cutoff = 16\nhorizon = 1.0\nn_paths = 2\nomega_check_horizon = 60.0\n";

#[test]
fn params_reports_rotation_zeta() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "d = 2\ncutoff = 8\nmatrix = [[0.0, -1.0], [1.0, 0.0]]\n", &["params"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir.path().join("params.json"));
    assert_eq!(r["report"]["derived"]["zeta"]["value"].as_f64(), Some(0.4));
    assert_eq!(r["report"]["matrix_symmetry"], "antisymmetric");
    assert_eq!(r["passed"], true);
}

#[test]
fn unknown_key_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "nu = 1.0\nviscosity = 2.0\n", &["params"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("viscosity"));
    let out = run(dir.path(), "nu = 1.0\nnu = 2.0\n", &["params"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_thread_cap_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gevrey-flow"))
        .args(["params", "--out"])
        .arg(dir.path())
        .env("GEVREY_FLOW_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn omega_mc_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "alpha = 1.0\nbeta = 1.0\nnu = 1.0\nmc_paths = 4000\nmc_dt = 1e-2\n", &["omega-mc"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&dir.path().join("omega-mc.json"));
    let est = r["report"]["result"]["estimate"].as_f64().unwrap();
    assert!((est - 0.864_664_716_763_387).abs() < 0.03, "{est}");
}

#[test]
fn simulate_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}norms = [\"phi:0:2\"]\n");
    assert_eq!(run(a.path(), &cfg, &["simulate", "--seed", "3"]).status.code(), Some(0));
    assert_eq!(run(b.path(), &cfg, &["simulate", "--seed", "3"]).status.code(), Some(0));
    for name in ["simulate.json", "series_0.csv", "series_1.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let csv = std::fs::read_to_string(a.path().join("series_0.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "t,W,phi+0.05:0.9:1,phi:0:2");
    assert_eq!(csv.lines().count(), 1 + 11);
    let r = report(&a.path().join("simulate.json"));
    assert_eq!(r["config"]["seed"], 3);

    let c = tempfile::tempdir().unwrap();
    run(c.path(), &cfg, &["simulate", "--seed", "4"]);
    assert_ne!(std::fs::read(c.path().join("series_0.csv")).unwrap(), csv.as_bytes());
}

#[test]
fn verify_decay_passes_on_default_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), SMALL, &["verify-decay"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(&dir.path().join("verify-decay.json"));
    let paths = r["report"]["paths"].as_array().unwrap();
    assert_eq!(paths.len(), 2);
    for p in paths {
        assert_eq!(p["decay"]["envelope"]["holds"], true);
        assert!(p["decay"]["fit"]["rate"].as_f64().unwrap() < -0.2);
    }
}

#[test]
fn inviscid_attractive_run_blows_up() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "matrix = [[1.0]]\nnu = 0.0\npath = \"zero\"\ninitial_profile = \"single_mode\"\n\
               initial_norm = 0.04975\nblowup_factor = 1000.0\nhorizon = 5.0\n";
    let out = run(dir.path(), cfg, &["simulate"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&dir.path().join("simulate.json"));
    let term = &r["report"]["paths"][0]["termination"];
    assert_eq!(term["status"], "blowup");
    assert!(term["t"].as_f64().unwrap() < 5.0);
    assert!(r["failures"][0].as_str().unwrap().contains("stopped early"));
}

#[test]
fn verify_decay_refuses_attractive_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}matrix = [[1.0]]\ninitial_norm = 0.01\n");
    let out = run(dir.path(), &cfg, &["verify-decay"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&dir.path().join("verify-decay.json"));
    assert!(r["failures"][0].as_str().unwrap().contains("zeta_positive"));
}

#[test]
fn field_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SMALL.replace("n_paths = 2", "n_paths = 1") + "dump_stride = 5\n";
    assert_eq!(run(dir.path(), &cfg, &["simulate"]).status.code(), Some(0));
    let bytes = std::fs::read(dir.path().join("series_0.bin")).unwrap();
    let records = read_field_dump(&bytes).unwrap();
    assert_eq!(records.len(), 3);
    assert_eq!((records[0].d, records[0].cutoff, records[0].t, records[0].w), (1, 16, 0.0, 0.0));
    assert_eq!(records[1].t, 0.5);
    assert_eq!(records[0].coeffs.len(), 33);
    assert_eq!(records[0].coeffs[16].norm(), 0.0);
    let csv = std::fs::read_to_string(dir.path().join("series_0.csv")).unwrap();
    let row: Vec<f64> = csv.lines().nth(6).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[0], records[1].t);
    assert_eq!(row[1], records[1].w);
}

#[test]
fn picard_compare_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "cutoff = 8\ndt = 1e-4\ninitial_norm = 0.5\n", &["picard-compare"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(&dir.path().join("picard-compare.json"));
    assert!(r["report"]["terminal_diff"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn property_suite_small() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "cutoff = 8\nn_fields = 20\nbound_samples = 20\noracle_fields = 5\njson = \"props.json\"\n";
    let out = run(dir.path(), cfg, &["property-suite"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(&dir.path().join("props.json"));
    assert!(r["report"]["convolution_oracle"]["max_relative_diff"].as_f64().unwrap() <= 1e-10);
    assert!(r["report"]["rescaling"]["relative_discrepancy"].as_f64().unwrap() <= 1e-5);
}
