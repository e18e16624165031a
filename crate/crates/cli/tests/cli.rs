use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lambda_mixer_core::io::{read_sweep_csv, read_trajectory_csv};
use lambda_mixer_core::FieldState;
use serde_json::Value;
use tempfile::TempDir;

const EXE: &str = env!("CARGO_BIN_EXE_lambda-mixer");

fn run_with(dir: &Path, args: &[&str], config: Option<&str>, threads: Option<&str>) -> Output {
    let mut cmd = Command::new(EXE);
    cmd.current_dir(dir).args(args).env_remove("LAMBDA_MIXER_THREADS");
    if let Some(text) = config {
        let path = dir.join("run.cfg");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    if let Some(n) = threads {
        cmd.env("LAMBDA_MIXER_THREADS", n);
    }
    cmd.output().unwrap()
}

fn run(dir: &Path, args: &[&str], config: Option<&str>) -> Output {
    run_with(dir, args, config, None)
}

fn error_record(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|e| panic!("not a JSON record: {line:?} ({e})"))
}

fn output_bytes(dir: &TempDir, args: &[&str], config: Option<&str>, threads: Option<&str>, name: &str) -> Vec<u8> {
    let out = run_with(dir.path(), args, config, threads);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::read(dir.path().join(name)).unwrap()
}

#[test]
fn simulate_with_defaults_starts_at_the_initial_state() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["simulate"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_trajectory_csv(std::fs::File::open(dir.path().join("trajectory.csv")).unwrap()).unwrap();
    let first = rows[0];
    let want = FieldState::seeded(1e-2, FRAC_PI_4);
    assert_eq!(first.zeta, 0.0);
    assert_eq!([first.om1_re, first.om1_im, first.om2_re, first.om2_im], [1.0, 0.0, 1.0, 0.0]);
    assert_eq!([first.e1_re, first.e1_im], [want.e1.re, want.e1.im]);
    assert_eq!([first.e2_re, first.e2_im], [want.e2.re, want.e2.im]);
    assert!((first.phi - FRAC_PI_4).abs() < 1e-15);
    assert!((rows.last().unwrap().zeta - 200.0).abs() < 1e-9);
}

#[test]
fn out_flag_overrides_configured_path() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["simulate", "--out", "nested/t.csv"], Some("zeta_max = 5\noutput_path = cfg.csv\n"));
    assert!(out.status.success());
    assert!(dir.path().join("nested/t.csv").exists());
    assert!(!dir.path().join("cfg.csv").exists());

    let out = run(dir.path(), &["simulate"], Some("zeta_max = 5\noutput_path = cfg.csv\n"));
    assert!(out.status.success());
    assert!(dir.path().join("cfg.csv").exists());
}

#[test]
fn sweep_row_count_follows_the_grid() {
    let dir = TempDir::new().unwrap();
    let cfg = "eps_min = 1e-4\neps_max = 1e-2\npoints_per_decade = 5\n";
    let out = run(dir.path(), &["sweep"], Some(cfg));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = read_sweep_csv(std::fs::File::open(dir.path().join("sweep.csv")).unwrap()).unwrap();
    assert_eq!(table.rows.len(), (2 * 5 + 1) * 2);
    assert!(table.rows.windows(2).all(|w| w[0].epsilon <= w[1].epsilon));
    assert_eq!(table.rows.iter().filter(|r| r.phase_terms).count(), 11);
    assert!(table.rows.iter().all(|r| r.l_measured.is_finite()));
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let cfg = "zeta_max = 40\neps_min = 1e-3\neps_max = 1e-1\npoints_per_decade = 4\n";
    for (cmd, name) in [("simulate", "trajectory.csv"), ("eigen", "spectrum.json"), ("sweep", "sweep.csv")] {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        let first = output_bytes(&a, &[cmd], Some(cfg), Some("1"), name);
        let second = output_bytes(&b, &[cmd], Some(cfg), Some("4"), name);
        assert!(!first.is_empty());
        assert!(first == second, "{cmd} output differs between runs");
    }
}

#[test]
fn eigen_writes_the_spectrum() {
    for (model, dim) in [("four_level", 4), ("five_level", 5)] {
        let dir = TempDir::new().unwrap();
        let out = run(dir.path(), &["eigen"], Some(&format!("model = {model}\nepsilon = 0.05\n")));
        assert!(out.status.success());
        let v: Value = serde_json::from_slice(&std::fs::read(dir.path().join("spectrum.json")).unwrap()).unwrap();
        assert_eq!(v["model"], model);
        assert_eq!(v["epsilon"], 0.05);
        let pairs = v["eigenpairs"].as_array().unwrap();
        assert_eq!(pairs.len(), dim);
        for p in pairs {
            assert_eq!(p["vector"].as_array().unwrap().len(), dim);
            assert!(p["residual"].as_f64().unwrap() < 1e-12);
            assert!(p["value_re"].is_f64() && p["value_im"].is_f64());
        }
    }
}

#[test]
fn config_errors_exit_with_code_two() {
    let cases = [
        ("epsilon = -1\n", "validation_error"),
        ("colour = blue\n", "unknown_key"),
        ("epsilon 0.1\n", "parse_error"),
        ("model = six_level\n", "validation_error"),
    ];
    for (text, kind) in cases {
        let dir = TempDir::new().unwrap();
        let out = run(dir.path(), &["simulate"], Some(text));
        assert_eq!(out.status.code(), Some(2), "{text:?}");
        let rec = error_record(&out);
        assert_eq!(rec["error"], kind, "{text:?}");
        assert_eq!(rec["exit_code"], 2);
        assert!(!rec["message"].as_str().unwrap().is_empty());
        assert!(!dir.path().join("trajectory.csv").exists());
    }
    let dir = TempDir::new().unwrap();
    let rec = error_record(&run(dir.path(), &["simulate"], Some("epsilon = -1\n")));
    assert!(rec["message"].as_str().unwrap().contains("epsilon"));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = run_with(dir.path(), &["sweep"], Some("eps_min = 1e-2\neps_max = 1e-1\npoints_per_decade = 1\n"), Some("zero"));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"], "validation_error");
}

#[test]
fn missing_config_file_is_reported() {
    let dir = TempDir::new().unwrap();
    let missing: PathBuf = dir.path().join("absent.cfg");
    let out = Command::new(EXE).current_dir(dir.path()).arg("eigen").arg("--config").arg(&missing).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_record(&out)["error"], "io");
}

#[test]
fn validate_report_lists_invariant_drifts() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["validate"], None);
    let report: Value = serde_json::from_slice(&std::fs::read(dir.path().join("validation_report.json")).unwrap()).unwrap();
    let passed = report["passed"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if passed { 0 } else { 4 }));

    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 9);
    let find = |name: &str| checks.iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"));
    let conservation = &find("conservation")["values"];
    for key in ["drift_c1", "drift_c2", "drift_c3", "drift_total"] {
        assert!(conservation[key].as_f64().unwrap() <= 1e-8, "{key}");
    }
    assert!(find("c4_regimes")["values"]["drift_c4_no_phase"].as_f64().unwrap() <= 1e-8);
    for c in checks {
        if c["passed"].as_bool().unwrap() {
            assert!(c["runtime_s"].as_f64().unwrap() <= c["budget_s"].as_f64().unwrap());
        }
        assert!(c["tolerance"].is_f64());
    }
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().filter(|l| l.starts_with("PASS ") || l.starts_with("FAIL ")).count(), 9);
}
