//! Harness-level tests: CSV schema stability (golden), plot-data series
//! contracts, config validation paths, and the exit-status guard.

use serde_json::json;

use online_adp::models::testbed;
use online_adp_cli::config::{ExperimentConfig, PowersConfig};
use online_adp_cli::report::{emit_report, ReportSeries};
use online_adp_cli::{read_trajectory_csv, run_experiment, CSV_HEADER};

fn two_state_config(algorithm: &str, horizon: usize) -> serde_json::Value {
    let kernel = testbed::two_state_kernel();
    let base = testbed::two_state_base_cost(&kernel);
    json!({
        "model": { "inline": kernel },
        "scenario": { "kind": "static", "base_cost": base },
        "algorithm": algorithm,
        "horizon": horizon,
        "seed": 7,
        "drift_samples": 4,
    })
}

fn run_value(value: &serde_json::Value, dir: &std::path::Path) -> online_adp_cli::RunOutcome {
    let config: ExperimentConfig = serde_json::from_value(value.clone()).unwrap();
    run_experiment(&config, value, dir, dir, None).unwrap()
}

/// Golden schema: header and row shape are pinned; floats carry 17
/// significant digits so the file round-trips exactly.
#[test]
fn trajectory_csv_schema_is_stable() {
    assert_eq!(
        CSV_HEADER,
        "k,err,bound,bound_stepwise,m_k,e_k,realized_eps,realized_delta,\
         rho_k,gamma1_k,eta1_k,rho_bar_k"
            .replace("         ", "")
    );
    let dir = tempfile::tempdir().unwrap();
    let mut value = two_state_config("avi", 4);
    value["params"] = json!({ "powers": { "constant": 1 } });
    run_value(&value, dir.path());
    let text = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 5, "header plus one row per step");
    // Static two-state run from J0 = 0: err_0 = ‖J* − 0‖ as the linear
    // solve produced it, all drift zero.
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first.len(), 12);
    assert_eq!(first[0], "0");
    assert_eq!(first[1], "1.0000000000000004e1");
    assert_eq!(first[4], "1");
    assert_eq!(first[8], "0.0000000000000000e0");
    // The final row has no consecutive pair, so drift cells are empty.
    let last: Vec<&str> = lines[4].split(',').collect();
    assert_eq!(last[8], "");
    // Every float cell round-trips through parse exactly.
    let parsed = read_trajectory_csv(&dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(parsed.errors[0], 10.000000000000004);
}

/// A static exact-VI experiment must pass all checks and converge.
#[test]
fn static_avi_run_passes_and_converges() {
    let dir = tempfile::tempdir().unwrap();
    let mut value = two_state_config("avi", 200);
    value["params"] = json!({ "powers": { "constant": 1 } });
    let outcome = run_value(&value, dir.path());
    assert!(outcome.manifest.all_pass);
    let final_err = *outcome.trajectory.errors().last().unwrap();
    assert!(
        final_err <= 1e-6,
        "classical VI should converge, final error {final_err}"
    );
}

#[test]
fn plotdata_series_naming_follows_the_trajectory_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut avi = two_state_config("avi", 12);
    avi["params"] = json!({ "powers": { "constant": 1 } });
    let avi_out = run_value(&avi, dir.path());

    let single = vec![ReportSeries::from_trajectory(&avi_out.trajectory)];
    let single_path = dir.path().join("single.csv");
    emit_report(&single, &single_path).unwrap();
    let text = std::fs::read_to_string(&single_path).unwrap();
    let series: std::collections::BTreeSet<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(
        series.into_iter().collect::<Vec<_>>(),
        vec!["bound_t1", "err"]
    );

    let mut async_vi = two_state_config("async-vi", 12);
    async_vi["params"] = json!({
        "powers": { "constant": 1 },
        "partition": { "blocks": 2 },
        "schedule": { "kind": "round-robin", "t_a": 2, "t_d": 0 },
    });
    let async_out = run_value(&async_vi, dir.path());
    let both = vec![
        ReportSeries::from_trajectory(&avi_out.trajectory),
        ReportSeries::from_trajectory(&async_out.trajectory),
    ];
    let both_path = dir.path().join("both.csv");
    emit_report(&both, &both_path).unwrap();
    let text = std::fs::read_to_string(&both_path).unwrap();
    let series: std::collections::BTreeSet<String> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(
        series.into_iter().collect::<Vec<_>>(),
        vec![
            "async-vi:bound_t6",
            "async-vi:err",
            "avi:bound_t1",
            "avi:err"
        ]
    );
}

#[test]
fn report_rejects_empty_and_mismatched_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let err = emit_report(&[], &dir.path().join("x.csv")).unwrap_err();
    assert!(err.to_string().contains("usage error"));

    let a = ReportSeries {
        label: "a".into(),
        bound_name: "bound_t1".into(),
        errors: vec![1.0; 5],
        bounds: vec![None; 5],
    };
    let b = ReportSeries {
        label: "b".into(),
        bound_name: "bound_t2".into(),
        errors: vec![1.0; 7],
        bounds: vec![None; 7],
    };
    let err = emit_report(&[a, b], &dir.path().join("y.csv")).unwrap_err();
    assert!(err.to_string().contains("share a horizon"));
}

#[test]
fn config_validation_names_the_offending_field() {
    // m_k = 0.
    let err = PowersConfig::build(Some(&PowersConfig::List(vec![1, 0, 2])), 3, "params.powers")
        .unwrap_err();
    assert_eq!(err.field, "params.powers");
    assert!(err.message.contains("m[1]"), "message was: {}", err.message);

    // Conflicting horizons.
    let mut value = two_state_config("avi", 10);
    value["scenario"]["horizon"] = json!(12);
    let config: ExperimentConfig = serde_json::from_value(value).unwrap();
    let err = config.resolve_horizon().unwrap_err();
    assert_eq!(err.field, "horizon");

    // Unknown algorithm is rejected at parse time.
    let mut bad = two_state_config("avi", 10);
    bad["algorithm"] = json!("gradient-descent");
    assert!(serde_json::from_value::<ExperimentConfig>(bad).is_err());
}

/// Exit-status guard: a tampered trajectory flips its check, which is
/// exactly what the binary maps to a nonzero exit.
#[test]
fn tampered_trajectory_fails_its_check() {
    let dir = tempfile::tempdir().unwrap();
    let mut value = two_state_config("avi", 30);
    value["params"] = json!({ "powers": { "constant": 1 } });
    let config: ExperimentConfig = serde_json::from_value(value.clone()).unwrap();
    let outcome = run_experiment(&config, &value, dir.path(), dir.path(), None).unwrap();
    assert!(outcome.manifest.all_pass);

    let mut traj = outcome.trajectory;
    let drift = outcome.manifest.drift;
    let params =
        online_adp_cli::assemble_bound_params(&traj, &drift, outcome.manifest.alpha, None).unwrap();
    // Push one recorded error far above its bound.
    traj.steps[20].error += 1e3;
    let kernel = testbed::two_state(30);
    let (checks, _) = online_adp_cli::evaluate_bounds(&mut traj, &kernel, &params, 9, 6).unwrap();
    assert!(
        checks.iter().any(|c| !c.pass),
        "tampering must flip a check"
    );
}

/// Exit-status contract of the binary itself: 0 when all checks pass,
/// 2 on usage errors.
#[test]
fn binary_exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let mut value = two_state_config("avi", 20);
    value["params"] = json!({ "powers": { "constant": 1 } });
    let good = dir.path().join("good.json");
    std::fs::write(&good, serde_json::to_string_pretty(&value).unwrap()).unwrap();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_online-adp"))
        .args(["run", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    value["params"] = json!({ "powers": { "list": vec![0; 20] } });
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string_pretty(&value).unwrap()).unwrap();
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_online-adp"))
        .args(["run", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("out2"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("powers.m[0]"), "stderr was: {stderr}");

    let status = std::process::Command::new(env!("CARGO_BIN_EXE_online-adp"))
        .args(["validate", "--config"])
        .arg(&good)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    // `validate` dry-builds the parameters, so it catches m_k = 0 too.
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_online-adp"))
        .args(["validate", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("powers.m[0]"));
}

/// The written manifest lists every check with an explicit margin.
#[test]
fn manifest_lists_checks_with_margins() {
    let dir = tempfile::tempdir().unwrap();
    let mut value = two_state_config("opi", 20);
    value["params"] = json!({ "powers": { "cycle": [1, 2] } });
    run_value(&value, dir.path());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    let checks = manifest["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for check in checks {
        assert!(check["margin"].is_number());
        assert!(check["pass"].is_boolean());
    }
    assert_eq!(manifest["algorithm"], "opi");
    assert!(manifest["drift"]["rho"]["max"].is_number());
}
