//! End-to-end tests of the command-line interface: exit codes, file
//! round-trips, and schema validation of every emitted report.

use std::path::PathBuf;
use std::process::{Command, Output};

use shimura_core::schema;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shimura"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("shimura-cli-test-{}-{name}", std::process::id()));
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn shimura")
}

#[test]
fn weil_subcommand_lists_and_flags() {
    let out = run(&["weil", "--n", "2"]);
    assert!(out.status.success());
    let report: schema::WeilReportFile =
        serde_json::from_slice(&out.stdout).expect("valid weil report");
    assert_eq!(report.count, 10);
    // The β = 1 + i entry carries β¹² = -64.
    assert!(report
        .entries
        .iter()
        .any(|e| e.a == "-2" && e.beta12.as_deref() == Some("-64")));
}

#[test]
fn card_round_trip_through_files() {
    let card_path = tmp("card.json");
    let out = run(&[
        "invariants",
        "--quadratic",
        "-5",
        "--emit-card",
        card_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: schema::InvariantsReportFile = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.field.class_number, "2");
    assert_eq!(report.class_group.order, "2");

    // Reload the card and reuse it; the emission must be identical.
    let text1 = std::fs::read_to_string(&card_path).unwrap();
    let parsed: schema::CardFile = serde_json::from_str(&text1).unwrap();
    let card = schema::card_from_file(&parsed).unwrap();
    let text2 = schema::to_json_string(&schema::card_to_file(&card)).unwrap();
    assert_eq!(text1, text2);

    // Driving the pipeline from the card file matches the built-in source.
    let from_card = run(&["bound", "--card", card_path.to_str().unwrap()]);
    let from_d = run(&["bound", "--quadratic", "-5"]);
    assert!(from_card.status.success());
    assert_eq!(from_card.stdout, from_d.stdout);
    std::fs::remove_file(&card_path).ok();
}

#[test]
fn exceptional_membership_and_report_files() {
    let out_path = tmp("report.json");
    let out = run(&[
        "exceptional",
        "--quadratic",
        "-5",
        "--test-prime",
        "7",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let report: schema::ExceptionalReportFile = serde_json::from_str(&text).unwrap();
    match report.outcome {
        schema::OutcomeDto::Membership { is_member, in_n0, .. } => {
            assert!(is_member);
            assert!(in_n0);
        }
        other => panic!("unexpected outcome {other:?}"),
    }
    assert_eq!(report.config.a1, "40");
    std::fs::remove_file(&out_path).ok();
}

#[test]
fn exit_code_contract() {
    // 0: success.
    assert_eq!(run(&["weil", "--n", "5"]).status.code(), Some(0));
    // 1: input errors of several kinds.
    assert_eq!(run(&["exceptional", "--quadratic", "12"]).status.code(), Some(1));
    assert_eq!(run(&["exceptional", "--quadratic", "x"]).status.code(), Some(1));
    assert_eq!(run(&["certify", "--quadratic", "-5", "--disc", "30"]).status.code(), Some(1));
    assert_eq!(run(&["exceptional", "--card", "/nonexistent.json"]).status.code(), Some(1));
    let conflicting = run(&[
        "exceptional",
        "--quadratic",
        "-5",
        "--test-prime",
        "7",
        "--list-upto",
        "10",
    ]);
    assert_eq!(conflicting.status.code(), Some(1));
    // 2: hypothesis refusal, certificate still written.
    let cert_path = tmp("refusal.json");
    let out = run(&[
        "certify",
        "--quadratic",
        "-1",
        "--disc",
        "6",
        "--list-limit",
        "50",
        "-o",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let text = std::fs::read_to_string(&cert_path).unwrap();
    let cert: schema::CertificateFile = serde_json::from_str(&text).unwrap();
    assert!(!cert.in_force);
    assert!(cert.hypotheses.iter().any(|h| h.name == "hcf_free" && h.status == "failed"));
    std::fs::remove_file(&cert_path).ok();
}

#[test]
fn malformed_card_gives_schema_diagnostics() {
    let bad_path = tmp("bad-card.json");
    std::fs::write(&bad_path, "{\"schema\": \"fieldcard/1\"}").unwrap();
    let out = run(&["exceptional", "--card", bad_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error"), "stderr: {err}");
    std::fs::remove_file(&bad_path).ok();
}

#[test]
fn certify_writes_certificate_and_text() {
    let cert_path = tmp("cert.json");
    let out = run(&[
        "certify",
        "--quadratic",
        "-5",
        "--disc",
        "6",
        "--a1",
        "40",
        "--list-limit",
        "100",
        "-o",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("q = 7"));
    assert!(stdout.contains("elliptic points of order 2 or 3"));
    let text = std::fs::read_to_string(&cert_path).unwrap();
    let cert: schema::CertificateFile = serde_json::from_str(&text).unwrap();
    assert!(cert.in_force);
    assert_eq!(cert.admissible_q.as_ref().unwrap().q, "7");
    assert_eq!(cert.exceptional.schema, "exceptional-report/1");
    std::fs::remove_file(&cert_path).ok();
}

#[test]
fn quaternion_subcommand() {
    let out = run(&["quaternion", "--disc", "10", "--quadratic", "2"]);
    assert!(out.status.success());
    let report: schema::QuaternionReportFile = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.ramified_primes, vec!["2", "5"]);
    assert_eq!(report.splits_over_k, Some(true));
    assert_eq!(report.admissible_q.unwrap().q, "7");
}

#[test]
fn config_file_via_environment() {
    let cfg_path = tmp("config.json");
    std::fs::write(&cfg_path, "{\"a1\": \"12\", \"list_limit\": 30}").unwrap();
    let out = bin()
        .env("SHIMURA_CONFIG", cfg_path.to_str().unwrap())
        .args(["bound", "--quadratic", "-5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: schema::BoundReportFile = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.config.a1, "12");
    assert_eq!(report.config.list_limit, 30);
    // Command line still wins over the file.
    let out = bin()
        .env("SHIMURA_CONFIG", cfg_path.to_str().unwrap())
        .args(["bound", "--quadratic", "-5", "--a1", "40"])
        .output()
        .unwrap();
    let report: schema::BoundReportFile = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.config.a1, "40");
    std::fs::remove_file(&cfg_path).ok();
}
