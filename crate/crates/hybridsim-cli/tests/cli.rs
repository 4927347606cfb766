//! End-to-end checks of the command-line contract: output schema, number
//! formatting, CSV/JSON agreement, exit codes, config-file overrides, and
//! run-to-run determinism of the shipped binary.

use hybridsim_cli::{
    emit_records, run_scenario, CliError, OutputFormat, ScenarioConfig, SWEEP_FIELDS,
};
use hybridsim_core::channel::loss_db_to_transmissivity;
use hybridsim_core::ChannelPair;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hybridsim"))
}

/// Accepts exactly the sweep number format: one mantissa digit, a decimal
/// point, eleven fractional digits, and a decimal exponent.
fn is_sci12(cell: &str) -> bool {
    let body = cell.strip_prefix('-').unwrap_or(cell);
    let Some((mant, exp)) = body.split_once('e') else {
        return false;
    };
    let mant = mant.as_bytes();
    let digits_ok = mant.len() == 13
        && mant[0].is_ascii_digit()
        && mant[1] == b'.'
        && mant[2..].iter().all(u8::is_ascii_digit);
    let exp = exp.strip_prefix('-').unwrap_or(exp);
    digits_ok && !exp.is_empty() && exp.bytes().all(|b| b.is_ascii_digit())
}

fn split_csv(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn csv_header_matches_the_pinned_field_list_and_one_record_gives_two_lines() {
    let config = ScenarioConfig::from_json(r#"{"scheme": "direct", "alpha0": 1.2}"#).unwrap();
    let records = run_scenario(&config).unwrap();
    assert_eq!(records.len(), 1);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    emit_records(&records, OutputFormat::Csv, Some(&path)).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "expected header plus one row:\n{text}");
    assert_eq!(lines[0], SWEEP_FIELDS.join(","));
}

#[test]
fn csv_cells_use_twelve_significant_digits() {
    let config = ScenarioConfig::from_json(
        r#"{"scheme": "teleport-dv", "alpha0": 1.5, "loss_db": [0.0, 6.0], "r": 2.5}"#,
    )
    .unwrap();
    let records = run_scenario(&config).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fmt.csv");
    emit_records(&records, OutputFormat::Csv, Some(&path)).unwrap();
    let rows = split_csv(&std::fs::read_to_string(&path).unwrap());

    let float_cols = ["alpha0", "r", "g", "t_a", "t_b", "total_loss_db", "fidelity", "runtime_ms"];
    for row in &rows[1..] {
        for name in float_cols {
            let idx = SWEEP_FIELDS.iter().position(|f| *f == name).unwrap();
            assert!(
                is_sci12(&row[idx]),
                "column {name} cell {:?} is not in 12-digit scientific form",
                row[idx]
            );
        }
        let ln_idx = SWEEP_FIELDS.iter().position(|f| *f == "log_negativity").unwrap();
        if !row[ln_idx].is_empty() {
            assert!(is_sci12(&row[ln_idx]));
        }
        for name in ["above_qubit_limit", "above_coherent_limit"] {
            let idx = SWEEP_FIELDS.iter().position(|f| *f == name).unwrap();
            assert!(row[idx] == "true" || row[idx] == "false");
        }
    }
}

#[test]
fn csv_and_json_encodings_carry_identical_values() {
    let configs = [
        r#"{"scheme": "teleport-dv", "alpha0": [0.8, 1.5], "loss_db": "0:10:3", "r": 2.5}"#,
        r#"{"scheme": "direct", "alpha0": 1.2, "ta": [0.5, 1.0], "tb": 0.75}"#,
        r#"{"scheme": "teleport-cv", "alpha0": 1.5, "loss_db": 6.0}"#,
    ];
    for text in configs {
        let config = ScenarioConfig::from_json(text).unwrap();
        let records = run_scenario(&config).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("out.csv");
        let json_path = dir.path().join("out.json");
        emit_records(&records, OutputFormat::Csv, Some(&csv_path)).unwrap();
        emit_records(&records, OutputFormat::Json, Some(&json_path)).unwrap();

        let rows = split_csv(&std::fs::read_to_string(&csv_path).unwrap());
        let parsed: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
        let objects = parsed.as_array().unwrap();
        assert_eq!(objects.len(), rows.len() - 1);

        for (row, obj) in rows[1..].iter().zip(objects) {
            let map = obj.as_object().unwrap();
            let keys: Vec<&str> = map.keys().map(String::as_str).collect();
            assert_eq!(keys, SWEEP_FIELDS, "JSON key order drifted from the CSV header");
            for (cell, field) in row.iter().zip(SWEEP_FIELDS) {
                let value = &map[field];
                match value {
                    serde_json::Value::Null => assert!(
                        cell.is_empty(),
                        "field {field}: JSON null but CSV cell {cell:?}"
                    ),
                    serde_json::Value::Bool(b) => assert_eq!(cell, &b.to_string()),
                    serde_json::Value::Number(n) => {
                        let csv_num: f64 = cell.parse().unwrap();
                        assert_eq!(
                            csv_num,
                            n.as_f64().unwrap(),
                            "field {field} differs between encodings"
                        );
                    }
                    serde_json::Value::String(s) => assert_eq!(cell, s),
                    other => panic!("unexpected JSON value {other:?} for field {field}"),
                }
            }
        }
    }
}

#[test]
fn write_failures_surface_as_io_errors_naming_the_path() {
    let config = ScenarioConfig::from_json(r#"{"scheme": "direct", "alpha0": 1.0}"#).unwrap();
    let records = run_scenario(&config).unwrap();
    let bad = Path::new("/nonexistent-hybridsim-dir/out.csv");
    let err = emit_records(&records, OutputFormat::Csv, Some(bad)).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }));
    assert_eq!(err.exit_code(), 1);
    assert!(
        err.to_string().contains("/nonexistent-hybridsim-dir/out.csv"),
        "error message should name the path: {err}"
    );
}

#[test]
fn empty_grids_are_rejected_as_validation_errors() {
    let config = ScenarioConfig::from_json(r#"{"scheme": "direct", "alpha0": []}"#).unwrap();
    let err = run_scenario(&config).unwrap_err();
    assert!(matches!(err, CliError::Validation(_)));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn decibel_conversions_are_consistent() {
    assert_eq!(loss_db_to_transmissivity(0.0).unwrap(), 1.0);
    let half = loss_db_to_transmissivity(3.0103).unwrap();
    assert!((half - 0.5).abs() < 1e-4);
    let ch = ChannelPair::symmetric(0.5).unwrap();
    assert!((ch.total_loss_db() - 6.0206).abs() < 1e-3);
    assert_eq!(ChannelPair::lossless().total_loss_db(), 0.0);
}

#[test]
fn binary_runs_direct_and_crossover_scenarios_cleanly() {
    let out = bin()
        .args(["direct", "--alpha0", "1.2", "--loss-db", "3"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with(&SWEEP_FIELDS.join(",")));

    let out = bin()
        .args(["crossover", "--alpha0", "0.3,1.0", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha0,r,crossover_db");
    assert_eq!(lines.len(), 3);
}

#[test]
fn binary_flags_override_config_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.json");
    std::fs::write(&cfg, r#"{"alpha0": 0.5, "r": 1.5}"#).unwrap();

    let out = bin()
        .args(["direct", "--config", cfg.to_str().unwrap(), "--alpha0", "2.0"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let rows = split_csv(&String::from_utf8(out.stdout).unwrap());
    let alpha_idx = SWEEP_FIELDS.iter().position(|f| *f == "alpha0").unwrap();
    let r_idx = SWEEP_FIELDS.iter().position(|f| *f == "r").unwrap();
    let alpha: f64 = rows[1][alpha_idx].parse().unwrap();
    let r: f64 = rows[1][r_idx].parse().unwrap();
    assert_eq!(alpha, 2.0, "flag should override the config amplitude");
    assert_eq!(r, 1.5, "config squeezing should survive when no flag is given");
}

#[test]
fn binary_rejects_invalid_scenarios_with_exit_code_two() {
    // Tuned gain is undefined when a grid point has a dead uplink arm.
    let out = bin()
        .args([
            "teleport-dv",
            "--gain-mode",
            "tuned",
            "--ta",
            "0,0.5",
            "--tb",
            "0.5",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // Log negativity is not defined for the cv-teleport scheme output here.
    let out = bin()
        .args(["teleport-cv", "--metric", "logneg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Empty grids cannot come from flags, only from a config file.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.json");
    std::fs::write(&cfg, r#"{"alpha0": []}"#).unwrap();
    let out = bin()
        .args(["direct", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn binary_reports_runtime_failures_with_exit_code_one() {
    // A one-photon cutoff cannot meet a 1e-14 trace-defect budget on a
    // lossy channel.
    let out = bin()
        .args([
            "teleport-dv",
            "--kmax",
            "1",
            "--delta",
            "1e-14",
            "--loss-db",
            "6",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(!out.stderr.is_empty());
}

#[test]
fn binary_sweeps_are_deterministic_up_to_the_runtime_column() {
    let args = [
        "sweep",
        "--scheme",
        "teleport-dv",
        "--alpha0",
        "0.8,1.2",
        "--loss-db",
        "0:12:4",
        "--r",
        "2.5",
    ];
    let strip_runtime = |text: &str| -> String {
        text.lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    };
    let first = bin().args(args).output().unwrap();
    let second = bin().args(args).output().unwrap();
    assert!(first.status.success());
    let a = strip_runtime(&String::from_utf8(first.stdout).unwrap());
    let b = strip_runtime(&String::from_utf8(second.stdout).unwrap());
    assert_eq!(a, b, "records drifted between identical runs");
    assert_eq!(a.lines().count(), 9, "2 amplitudes x 4 losses plus header");
}
