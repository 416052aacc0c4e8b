use normform::cli::{main_with_args, EXIT_CONDITIONAL, EXIT_ERROR, EXIT_OK, EXIT_USAGE};

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("normform").chain(args.iter().copied()))
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(run(&["--help"]), EXIT_OK);
    assert_eq!(run(&["solve", "--frobnicate"]), EXIT_USAGE);
    assert_eq!(run(&[]), EXIT_USAGE);
}

#[test]
fn verify_bundle() {
    assert_eq!(run(&["verify-bundle", "--bundle", &fixture("q_zeta7.json")]), EXIT_OK);
    assert_eq!(run(&["verify-bundle", "--bundle", &fixture("quartic_d4.json"), "--canonical"]), EXIT_OK);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = std::fs::read_to_string(fixture("q_zeta7.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["torsion_order"] = 3.into();
    std::fs::write(&bad, v.to_string()).unwrap();
    assert_eq!(run(&["verify-bundle", "--bundle", bad.to_str().unwrap()]), EXIT_ERROR);
    assert_eq!(run(&["verify-bundle", "--bundle", "/nonexistent/bundle.json"]), EXIT_ERROR);
}

#[test]
fn solve_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let code = run(&["solve", "--bundle", &fixture("q_zeta7.json"), "--alphas", "1,z,z2", "--m", "1", "--out", out.to_str().unwrap()]);
    assert!(code == EXIT_OK || code == EXIT_CONDITIONAL);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["sporadic"].as_array().map(|a| a.len()), Some(26));
}

#[test]
fn bad_problem_input_is_an_error() {
    assert_eq!(run(&["solve", "--bundle", &fixture("q_zeta7.json"), "--alphas", "1,z", "--m", "x"]), EXIT_ERROR);
    assert_eq!(run(&["oracle", "--bundle", &fixture("q_zeta7.json"), "--box", "2"]), EXIT_ERROR);
}

#[test]
fn oracle_and_bound() {
    assert_eq!(run(&["oracle", "--bundle", &fixture("q_zeta7.json"), "--alphas", "1,z,z2", "--m", "1", "--box", "3"]), EXIT_OK);
    assert_eq!(run(&["oracle", "--bundle", &fixture("q_zeta7.json"), "--unit-eq", "1,1,-1", "--box", "1"]), EXIT_OK);
    assert_eq!(run(&["bound", "--bundle", &fixture("q_zeta7.json"), "--coeffs", "1,1,-1"]), EXIT_OK);
    assert_eq!(run(&["bound", "--bundle", &fixture("q_zeta7.json"), "--coeffs", "1,1"]), EXIT_ERROR);
}
