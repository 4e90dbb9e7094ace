//! Exercises the installed binary: exit-code contract, JSON on stdout,
//! determinism under a fixed seed.

use std::process::{Command, Output};

fn quadbell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadbell"))
        .args(args)
        .env_remove("QUADBELL_SEED")
        .output()
        .expect("binary runs")
}

#[test]
fn witness_exit_codes() {
    let certified = quadbell(&["witness", "--state", "ghz3", "--settings", "mermin-xy"]);
    assert_eq!(certified.status.code(), Some(10), "{certified:?}");
    let json: serde_json::Value = serde_json::from_slice(&certified.stdout).unwrap();
    assert_eq!(json["verdict"], "certified-fully-entangled");
    assert!((json["q_f"].as_f64().unwrap() - 16.0).abs() < 1e-9);
    assert_eq!(json["schema_version"], 1);

    let inconclusive = quadbell(&["witness", "--state", "sep3-up", "--settings", "all-z"]);
    assert_eq!(inconclusive.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&inconclusive.stdout).unwrap();
    assert_eq!(json["verdict"], "inconclusive");
    assert!((json["q_f"].as_f64().unwrap() - 8.0).abs() < 1e-12);

    let bad = quadbell(&["witness", "--state", "no-such-state"]);
    assert!(bad.status.code().unwrap_or(0) >= 64);
    assert!(bad.stdout.is_empty());
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = ["witness", "--state", "mixed-max", "--settings", "random", "--seed", "7"];
    let first = quadbell(&args);
    let second = quadbell(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let json: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(json["seed"], 7);
    assert_eq!(json["f"].as_f64().unwrap(), 0.0);
    assert_eq!(json["splus"].as_f64().unwrap(), 0.0);

    // different seed, different random settings, expectations still zero
    let other = quadbell(&["witness", "--state", "mixed-max", "--settings", "random", "--seed", "8"]);
    let json: serde_json::Value = serde_json::from_slice(&other.stdout).unwrap();
    assert_eq!(json["f"].as_f64().unwrap(), 0.0);
}

#[test]
fn scan_is_csv_with_constant_qf_for_ghz() {
    let out = quadbell(&["scan", "--state", "ghz3", "--steps", "32"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema_version=1"));
    assert_eq!(lines.next(), Some("step,angle,f,fprime,q_f,q_s"));
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 6);
        let q_f: f64 = fields[4].parse().unwrap();
        assert!((q_f - 16.0).abs() < 1e-8, "q_f drifted: {line}");
        rows += 1;
    }
    assert_eq!(rows, 32);
}

#[test]
fn hv_demo_reports_the_counterexample() {
    let out = quadbell(&["hv", "demo"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["splus"].as_f64().unwrap(), 4.0);
    assert_eq!(json["sminus"].as_f64().unwrap(), 4.0);
    assert_eq!(json["q_s"].as_f64().unwrap(), 32.0);
    assert_eq!(json["satisfies_linear_svetlichny"], true);
    assert_eq!(json["violates_quadratic_biseparable"], true);
}

#[test]
fn bounds_small_sweep_passes() {
    let out = quadbell(&["bounds", "--n", "2,3", "--samples", "60", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["all_pass"], true);
    assert!(json["records"].as_array().unwrap().len() >= 8);
}

#[test]
fn optimize_writes_settings_and_trace() {
    let dir = std::env::temp_dir().join(format!("quadbell-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let settings_path = dir.join("settings.json");
    let trace_path = dir.join("trace.csv");
    let out = quadbell(&[
        "optimize",
        "--state",
        "singlet",
        "--objective",
        "chsh",
        "--restarts",
        "4",
        "--seed",
        "2",
        "--settings-out",
        settings_path.to_str().unwrap(),
        "--trace",
        trace_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((json["value"].as_f64().unwrap() - 2.0 * 2.0_f64.sqrt()).abs() < 1e-6);

    let trace = std::fs::read_to_string(&trace_path).unwrap();
    assert!(trace.starts_with("# schema_version=1\nrestart,iterations,value\n"));
    assert_eq!(trace.lines().count(), 2 + 4);

    // the emitted settings file round-trips through --settings
    let rerun = quadbell(&[
        "witness",
        "--state",
        "singlet",
        "--settings",
        settings_path.to_str().unwrap(),
    ]);
    assert_eq!(rerun.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn identities_cli_reports_small_residuals() {
    let out = quadbell(&["identities", "--n-max", "4", "--samples", "5", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for report in json["reports"].as_array().unwrap() {
        assert_eq!(report["sign_convention"], "as-printed");
        assert!(report["quadratic_residual"].as_f64().unwrap() < 1e-8);
    }
}
