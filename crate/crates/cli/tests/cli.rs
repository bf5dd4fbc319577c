//! End-to-end tests of the `blindspot` binary: golden payloads, exit codes,
//! and exact round-tripping of every emitted distribution.
//!
//! Set `BLESS=1` to rewrite the golden files after an intended output change.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use blindspot::json::AnyDistribution;
use blindspot::sampler::{stick_breaking_seeded, StickBase};
use blindspot::Rational;
use serde_json::Value;

fn manifest(path: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(path)
}

fn fixture(name: &str) -> String {
    manifest("tests/fixtures").join(name).to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blindspot")).args(args).output().expect("binary runs")
}

struct Golden {
    name: &'static str,
    args: Vec<String>,
    exit: i32,
}

fn golden_cases() -> Vec<Golden> {
    let f = fixture;
    let case = |name, args: &[&str], exit| Golden { name, args: args.iter().map(|s| s.to_string()).collect(), exit };
    vec![
        case(
            "jc_apply",
            &[
                "jc",
                "apply",
                "--prior",
                &f("halving.json"),
                "--partition",
                &f("split.json"),
                "--weights",
                r#"["1/3","2/3"]"#,
            ],
            0,
        ),
        case(
            "jc_rigidity",
            &[
                "jc",
                "rigidity",
                "--prior",
                &f("halving.json"),
                "--posterior",
                &f("thirds.json"),
                "--partition",
                &f("split.json"),
            ],
            0,
        ),
        case("jc_coarsest", &["jc", "coarsest", "--prior", &f("halving.json"), "--posterior", &f("thirds.json")], 0),
        case(
            "jc_brute_accessible",
            &["jc", "brute", "--prior", &f("halving.json"), "--posterior", &f("thirds.json")],
            10,
        ),
        case(
            "jc_brute_inaccessible",
            &["jc", "brute", "--prior", &f("uniform4.json"), "--posterior", &f("member.json")],
            0,
        ),
        case("bs_test_equal", &["bs", "test", "--prior", &f("halving.json"), "--posterior", &f("halving.json")], 10),
        case("bs_test_member", &["bs", "test", "--prior", &f("uniform4.json"), "--posterior", &f("member.json")], 0),
        case(
            "bs_test_prefix",
            &[
                "bs",
                "test",
                "--prior",
                &f("geometric_half.json"),
                "--posterior",
                &f("geometric_third.json"),
                "--horizon",
                "12",
            ],
            0,
        ),
        case(
            "bs_test_prefix_collision",
            &[
                "bs",
                "test",
                "--prior",
                &f("geometric_half.json"),
                "--posterior",
                &f("geometric_half.json"),
                "--horizon",
                "5",
            ],
            10,
        ),
        case("bs_construct", &["bs", "construct", "--priors", &f("priors.json"), "--horizon", "6", "--seed", "42"], 0),
        case(
            "bs_densify",
            &[
                "bs",
                "densify",
                "--prior",
                &f("uniform4.json"),
                "--target",
                &f("uniform4.json"),
                "--epsilon",
                "0.01",
                "--seed",
                "7",
            ],
            0,
        ),
        case(
            "bs_exteriorize",
            &[
                "bs",
                "exteriorize",
                "--prior",
                &f("geometric_half.json"),
                "--posterior",
                &f("member24.json"),
                "--epsilon",
                "1/20",
            ],
            0,
        ),
        case(
            "bs_multicollide",
            &[
                "bs",
                "multicollide",
                "--prior",
                &f("geometric_half.json"),
                "--posterior",
                &f("member24.json"),
                "--epsilon",
                "1/20",
                "--pairs",
                "2",
            ],
            0,
        ),
        case("bs_sample", &["bs", "sample", "--seed", "1", "--horizon", "6"], 0),
        case(
            "bs_montecarlo",
            &[
                "bs",
                "montecarlo",
                "--prior",
                &f("geometric_half.json"),
                "--trials",
                "200",
                "--horizon",
                "30",
                "--seed",
                "42",
            ],
            0,
        ),
        case("dist_normalize", &["dist", "normalize", "--values", r#"[1, 2, "3/2", "0.5"]"#], 0),
        case(
            "dist_distance",
            &["dist", "distance", "--left", &f("halving.json"), "--right", &f("thirds.json"), "--norm", "l1"],
            0,
        ),
        case(
            "dist_distance_l2_bounded",
            &[
                "dist",
                "distance",
                "--left",
                &f("halving.json"),
                "--right",
                &f("thirds.json"),
                "--norm",
                "l2",
                "--bounded",
            ],
            0,
        ),
    ]
}

/// Golden payloads are stored with fixture paths replaced by their file names.
fn normalize_paths(text: &str) -> String {
    text.replace(&format!("{}/", manifest("tests/fixtures").display()), "")
}

#[test]
fn golden_payloads_and_exit_codes() {
    let bless = std::env::var_os("BLESS").is_some();
    for case in golden_cases() {
        let args: Vec<&str> = case.args.iter().map(String::as_str).collect();
        let out = run(&args);
        let stdout = normalize_paths(&String::from_utf8(out.stdout).unwrap());
        assert_eq!(out.status.code(), Some(case.exit), "{}: {}", case.name, String::from_utf8_lossy(&out.stderr));
        let path = manifest("tests/golden").join(format!("{}.json", case.name));
        if bless {
            std::fs::write(&path, &stdout).unwrap();
        }
        let expected =
            std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
        assert_eq!(stdout, expected, "{} differs from its golden file", case.name);
        assert!(!out.stderr.is_empty(), "{} printed no summary", case.name);
    }
}

/// Exit code 10 exactly when the payload reports accessibility or a collision.
#[test]
fn exit_code_matches_payload_status() {
    for case in golden_cases() {
        let args: Vec<&str> = case.args.iter().map(String::as_str).collect();
        let out = run(&args);
        let payload: Value = serde_json::from_slice(&out.stdout).unwrap();
        let negative = matches!(payload["status"].as_str(), Some("accessible" | "collision_found"));
        assert_eq!(out.status.code() == Some(10), negative, "{}", case.name);
    }
}

fn distributions_in(value: &Value, found: &mut Vec<Value>) {
    match value {
        Value::Object(map) => {
            if map.contains_key("kind") {
                found.push(value.clone());
            }
            map.values().for_each(|v| distributions_in(v, found));
        }
        Value::Array(items) => items.iter().for_each(|v| distributions_in(v, found)),
        _ => {}
    }
}

#[test]
fn emitted_distributions_round_trip_exactly() {
    let mut seen = 0;
    for case in golden_cases() {
        let args: Vec<&str> = case.args.iter().map(String::as_str).collect();
        let payload: Value = serde_json::from_slice(&run(&args).stdout).unwrap();
        let mut found = Vec::new();
        distributions_in(&payload, &mut found);
        for doc in found {
            let text = doc.to_string();
            let reparsed = if case.name == "bs_sample" {
                AnyDistribution::<f64>::from_json(&text).unwrap().to_json_value()
            } else {
                let exact = AnyDistribution::<Rational>::from_json(&text).unwrap();
                assert_eq!(AnyDistribution::<Rational>::from_json(&exact.to_json_value().to_string()).unwrap(), exact);
                exact.to_json_value()
            };
            assert_eq!(reparsed, doc, "{}", case.name);
            seen += 1;
        }
    }
    assert!(seen >= 7);
}

#[test]
fn sampled_floats_survive_the_wire() {
    let out = run(&["bs", "sample", "--seed", "99", "--horizon", "40", "--base", "beta:0.5,3"]);
    let payload: Value = serde_json::from_slice(&out.stdout).unwrap();
    let parsed = AnyDistribution::<f64>::from_json(&payload["distribution"].to_string()).unwrap();
    let direct = stick_breaking_seeded(99, 40, &StickBase::beta(0.5, 3.0).unwrap()).unwrap();
    assert_eq!(parsed, AnyDistribution::Truncated(direct.distribution));
}

#[test]
fn jc_apply_prints_thirds() {
    let out = run(&[
        "jc",
        "apply",
        "--prior",
        &fixture("halving.json"),
        "--partition",
        r#"{"blocks":[[1],[2,3]]}"#,
        "--weights",
        r#"["1/3","2/3"]"#,
    ]);
    let payload: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(payload["posterior"]["probs"], serde_json::json!(["1/3", "1/3", "1/3"]));
    assert!(payload["certificate"]["claims"].as_array().unwrap().iter().all(|c| c["verified"] == true));
}

#[test]
fn equal_posterior_reports_first_pair() {
    let out = run(&["bs", "test", "--prior", &fixture("halving.json"), "--posterior", &fixture("halving.json")]);
    assert_eq!(out.status.code(), Some(10));
    let payload: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(payload["witness"], serde_json::json!([1, 2]));
    assert_eq!(payload["coarsest"]["blocks"], serde_json::json!([[1, 2, 3]]));
}

#[test]
fn input_errors_exit_2() {
    let cases: Vec<Vec<String>> = vec![
        vec!["frobnicate".into()],
        vec!["bs".into(), "frobnicate".into()],
        vec!["bs".into(), "sample".into(), "--horizon".into(), "5".into()],
        vec![
            "bs".into(),
            "construct".into(),
            "--priors".into(),
            fixture("priors.json"),
            "--horizon".into(),
            "5".into(),
        ],
        vec![
            "bs".into(),
            "test".into(),
            "--prior".into(),
            "{not json".into(),
            "--posterior".into(),
            fixture("halving.json"),
        ],
        vec![
            "bs".into(),
            "test".into(),
            "--prior".into(),
            "/nonexistent/prior.json".into(),
            "--posterior".into(),
            fixture("halving.json"),
        ],
        vec![
            "jc".into(),
            "apply".into(),
            "--prior".into(),
            fixture("halving.json"),
            "--partition".into(),
            "[[1],[2]]".into(),
            "--weights".into(),
            "[1]".into(),
        ],
        vec!["dist".into(), "normalize".into(), "--values".into(), "[0, 0]".into()],
        vec![
            "dist".into(),
            "distance".into(),
            "--left".into(),
            fixture("halving.json"),
            "--right".into(),
            fixture("thirds.json"),
            "--norm".into(),
            "l0".into(),
        ],
        vec![
            "bs".into(),
            "densify".into(),
            "--prior".into(),
            fixture("uniform4.json"),
            "--target".into(),
            fixture("uniform4.json"),
            "--epsilon".into(),
            "1e-3".into(),
            "--seed".into(),
            "1".into(),
        ],
        vec![
            "jc".into(),
            "rigidity".into(),
            "--prior".into(),
            fixture("thirds.json"),
            "--posterior".into(),
            fixture("halving.json"),
            "--partition".into(),
            fixture("split.json"),
            "--format".into(),
            "csv".into(),
        ],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let usage = run(&["frobnicate"]);
    assert!(String::from_utf8_lossy(&usage.stderr).contains("Usage"));
}

#[test]
fn horizon_errors_exit_3() {
    let f = fixture;
    let cases: Vec<Vec<String>> = vec![
        // Prefix of 4 stored coordinates cannot be inspected at N = 10.
        vec![
            "bs".into(),
            "test".into(),
            "--prior".into(),
            f("geometric_half.json"),
            "--posterior".into(),
            f("uniform4.json"),
            "--horizon".into(),
            "10".into(),
        ],
        // 30 disjoint collision moves cannot fit in 24 coordinates.
        vec![
            "bs".into(),
            "multicollide".into(),
            "--prior".into(),
            f("geometric_half.json"),
            "--posterior".into(),
            f("member24.json"),
            "--epsilon".into(),
            "1/20".into(),
            "--pairs".into(),
            "30".into(),
        ],
        // Nothing below epsilon within the horizon.
        vec![
            "bs".into(),
            "exteriorize".into(),
            "--prior".into(),
            f("geometric_half.json"),
            "--posterior".into(),
            f("member24.json"),
            "--epsilon".into(),
            "1/100000000".into(),
        ],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run(&args);
        assert_eq!(out.status.code(), Some(3), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn csv_output_follows_out_extension() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let json = dir.path().join("report.json");
    let base = [
        "bs",
        "montecarlo",
        "--prior",
        &fixture("geometric_half.json"),
        "--trials",
        "20",
        "--horizon",
        "10",
        "--seed",
        "3",
    ];
    let out = run(&[&base[..], &["--out", csv.to_str().unwrap()]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let table = std::fs::read_to_string(&csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("trial,in_blindspot,first_collision_i,first_collision_j,residual_mass"));
    assert_eq!(lines.count(), 20);

    run(&[&base[..], &["--out", json.to_str().unwrap()]].concat());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["trials"], 20);
    assert_eq!(report["seed"], 3);
}

#[test]
fn certificates_are_recomputed() {
    let out = run(&[
        "bs",
        "densify",
        "--prior",
        &fixture("geometric_half.json"),
        "--target",
        &fixture("member.json"),
        "--epsilon",
        "1/1000",
        "--seed",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let payload: Value = serde_json::from_slice(&out.stdout).unwrap();
    let cert = &payload["certificate"];
    assert_eq!(cert["operation"], "bs densify");
    assert_eq!(cert["seed"], 5);
    assert_eq!(cert["inputs_digest"].as_str().unwrap().len(), 64);
    assert_eq!(cert["bound_claimed"], "1/250");
    assert!(cert["claims"].as_array().unwrap().iter().all(|c| c["verified"] == true));
}
