//! End-to-end tests of the `isoflow` binary: determinism, config handling,
//! output formats and exit codes.

use std::process::{Command, Output};

fn isoflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isoflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn periods_csv_is_deterministic_and_full_precision() {
    let a = isoflow(&["periods", "--x", "0.5"]);
    let b = isoflow(&["periods", "--x", "0.5"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(stdout(&a), stdout(&b));

    let body = stdout(&a);
    let mut lines = body.lines();
    let header = lines.next().expect("header row");
    assert!(header.starts_with("x_re,x_im,"));
    assert!(header.contains("tau_re") && header.contains("i0_re"));
    let row = lines.next().expect("data row");
    // every value carries 17 significant digits in scientific notation
    for field in row.split(',') {
        assert!(
            field.contains('e') && field.contains('.'),
            "unexpected field {field:?}"
        );
        let mantissa = field.split('e').next().unwrap();
        let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
        assert_eq!(digits, 17, "field {field:?}");
    }
}

#[test]
fn periods_json_parses_and_matches_oracle() {
    let out = isoflow(&["periods", "--x", "0.5", "--format", "json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert!(value["rows"].as_array().is_some_and(|r| r.len() == 1));
    let tau = &value["summary"]["tau"];
    assert!(tau["re"].as_f64().unwrap().abs() < 1e-9);
    assert!((tau["im"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn verify_passes_on_admissible_modulus() {
    let out = isoflow(&["verify", "--x", "0.45,0.05", "--y0", "1.8,0.2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = stdout(&out);
    assert!(body.starts_with("check,residual,tolerance,pass"));
    for line in body.lines().skip(1) {
        assert!(line.ends_with(",1"), "failing check: {line}");
    }
}

#[test]
fn verify_fails_with_sloppy_quadrature() {
    // a loose quadrature tolerance leaves the 1e-10 relation checks unmet:
    // computation succeeds, verification fails
    let out = isoflow(&["verify", "--x", "0.5", "--tol", "1e-3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn errors_exit_with_code_2() {
    // modulus outside the admissible region
    let out = isoflow(&["periods", "--x", "0.95"]);
    assert_eq!(out.status.code(), Some(2));
    // unknown subcommand
    let out = isoflow(&["frobnicate", "--x", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    // missing modulus
    let out = isoflow(&["periods"]);
    assert_eq!(out.status.code(), Some(2));
    // unreadable config
    let out = isoflow(&["periods", "--config", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flow_config_file_with_inline_override() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("flow.json");
    let out_path = dir.path().join("flow.csv");
    std::fs::write(
        &config_path,
        format!(
            r#"{{
  "command": "flow",
  "curve": {{ "x": {{ "re": 0.45 }}, "x_end": {{ "re": 0.5 }} }},
  "pole": {{ "y0": {{ "re": 2.0 }}, "sheet": 1 }},
  "flow": {{ "n": 0, "A": {{ "re": 0.0 }}, "mode": "second_order", "samples": 5 }},
  "output": {{ "path": {:?} }}
}}"#,
            out_path.to_str().unwrap()
        ),
    )
    .unwrap();

    let out = isoflow(&["flow", "--config", config_path.to_str().unwrap(), "--n", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // summary goes to stdout when the body is written to a file
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("summary json");
    assert!(summary["relative_b_drift"].as_f64().unwrap() < 1e-8);

    let body = std::fs::read_to_string(&out_path).unwrap();
    assert!(body.starts_with("x_re,x_im,y0_re,y0_im"));
    assert_eq!(body.lines().count(), 6); // header + 5 samples
}

#[test]
fn rauch_check_reports_all_formulas() {
    let out = isoflow(&["rauch-check", "--x", "0.45,0.08", "--y0", "1.8,0.4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = stdout(&out);
    assert!(body.starts_with("formula,relative_residual,half_step_ratio,pass"));
    assert_eq!(body.lines().count(), 5); // header + 4 formulas
    for line in body.lines().skip(1) {
        assert!(line.ends_with(",1"), "failing formula: {line}");
    }
}

#[test]
fn boussinesq_summary_reports_wave_data() {
    let out = isoflow(&["boussinesq", "--x", "0.5", "--y0", "2", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = stdout(&out);
    let value: serde_json::Value = serde_json::from_str(&body).expect("valid json");
    let summary = &value["summary"];
    assert!(summary["max_residual"].as_f64().unwrap() < 1e-8);
    assert!(summary["c_spread"].as_f64().unwrap() < 1e-8);
}
