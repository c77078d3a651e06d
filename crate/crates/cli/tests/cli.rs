use std::path::Path;
use std::process::{Command, Output};

fn cvtele(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvtele"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn help_and_version_succeed() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&cvtele(dir.path(), &["--help"])), 0);
    assert_eq!(code(&cvtele(dir.path(), &["--version"])), 0);
}

#[test]
fn validation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["fig9"][..],
        &["fig1", "--H", "-1"],
        &["fig2", "--k", "-0.5"],
        &["modes", "--model", "de-sitter", "--k", "1", "--eta-min", "-10", "--eta-max", "-1"],
        &["modes", "--model", "radiation", "--H", "1", "--k", "1", "--eta-min", "1", "--eta-max", "2"],
        &["sweep", "missing.json", "--format", "text"],
        &["verify", "--format", "csv"],
    ] {
        let o = cvtele(dir.path(), args);
        assert_eq!(code(&o), if args[0] == "sweep" { 3 } else { 1 }, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn bad_sweep_config_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\n  \"models\": [\"Matter\"],\n  \"k\": [1],\n  \"H0\": 1\n}").unwrap();
    let o = cvtele(dir.path(), &["sweep", "bad.json"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = cvtele(dir.path(), &["fig2", "--out", "no/such/dir/fig2.csv"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn modes_writes_solution_and_flags_drift() {
    let dir = tempfile::tempdir().unwrap();
    let o = cvtele(
        dir.path(),
        &["modes", "--model", "radiation", "--k", "1", "--eta-min", "1", "--eta-max", "20"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eta,chi_re,chi_im,dchi_re,dchi_im,wronskian_abs_err"));
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[1].hypot(v[2]) * 2f64.sqrt() - 1.0).abs() < 1e-9);
        assert!(v[5] <= 1e-8);
    }

    // a loose tolerance over a long de Sitter run breaks the drift limit
    let o = cvtele(
        dir.path(),
        &[
            "modes", "--model", "de-sitter", "--H", "1", "--k", "1", "--eta-min", "-3000", "--eta-max", "-1",
            "--tol", "1e-6",
        ],
    );
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn modes_covariance_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = cvtele(
        dir.path(),
        &[
            "modes", "--model", "de-sitter", "--H", "1", "--k", "1", "--eta-min", "-100", "--eta-max", "-0.01",
            "--covariance",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("k,eta,regime,qq,pp,qp,nbar,fidelity_BH,fidelity_BI"));
}

#[test]
fn verify_report_shape_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = cvtele(dir.path(), &["verify", "--out", "report.json"]);
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["name"].is_string() && c["error"].is_number() && c["tolerance"].is_number());
        assert!(c["pass"].is_boolean());
        assert!(c.get("wall_time").is_none());
    }
    assert!(report["meta"]["version"].is_string());
    let schema_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/verify-report.schema.json");
    let schema: serde_json::Value = serde_json::from_slice(&std::fs::read(schema_path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    if let Err(e) = validator.validate(&report) {
        panic!("report does not match the schema: {e}");
    }
    let timed = cvtele(dir.path(), &["verify", "--timings", "--out", "timed.json"]);
    assert_eq!(code(&timed), code(&o));
    let timed: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("timed.json")).unwrap()).unwrap();
    assert!(validator.is_valid(&timed));
    assert!(timed["checks"][0]["wall_time"].is_number());
    let all_pass = checks.iter().all(|c| c["pass"] == true);
    assert_eq!(code(&o), if all_pass { 0 } else { 2 });

    // no randomness: a second run gives the same bytes
    let again = cvtele(dir.path(), &["verify", "--out", "report2.json"]);
    assert_eq!(code(&again), code(&o));
    assert_eq!(
        std::fs::read(dir.path().join("report.json")).unwrap(),
        std::fs::read(dir.path().join("report2.json")).unwrap()
    );
}
