use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_higgs-ks"))
        .args(args)
        .output()
        .expect("run higgs-ks")
}

fn scenario(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "scenarios", name]
        .iter()
        .collect();
    p.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn trivial_bundle_validates() {
    let o = bin(&["check", &scenario("trivial-validate.toml")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("[pass] valid validate_higgs"));
}

#[test]
fn nilpotent_h1_of_o_minus_two() {
    let o = bin(&["check", "--format", "structured", &scenario("nilpotent-h1.toml")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tasks"][0]["values"]["dim"], 1);
    assert_eq!(v["tasks"][0]["status"], "pass");
}

#[test]
fn undeclared_cocycle_is_an_input_error() {
    let o = bin(&["check", &scenario("undeclared-cocycle.toml")]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("undeclared cocycle `missing`"), "{err}");
    assert!(err.contains("line 4"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn failed_expectation_exits_one() {
    let o = bin(&["check", &scenario("wrong-expectation.toml")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witness: expected 2, got 1"));
}

#[test]
fn hand_written_cover_runs() {
    let o = bin(&["check", &scenario("custom-cover.toml")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn several_files_keep_argument_order() {
    let files = [
        scenario("nilpotent-h1.toml"),
        scenario("trivial-validate.toml"),
        scenario("custom-cover.toml"),
        scenario("wrong-expectation.toml"),
    ];
    let args: Vec<&str> = ["check", "--format", "structured"]
        .into_iter()
        .chain(files.iter().map(String::as_str))
        .collect();
    let o = bin(&args);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let sources: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["source"].as_str().unwrap())
        .collect();
    assert_eq!(sources, files.iter().map(String::as_str).collect::<Vec<_>>());
    // each file is isolated: the same scenario alone gives the same report
    let alone = bin(&["check", "--format", "structured", &files[0]]);
    let alone: serde_json::Value = serde_json::from_slice(&alone.stdout).unwrap();
    assert_eq!(v[0], alone);
}

#[test]
fn structured_output_is_byte_stable() {
    let args = [
        "check",
        "--example",
        "p1-nilpotent",
        "--format",
        "structured",
        "--seed",
        "11",
    ];
    let a = bin(&args);
    let b = bin(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn builtin_examples_pass() {
    for ex in ["p1-trivial", "p1-nilpotent", "interp-demo", "rees-demo"] {
        let o = bin(&["check", "--example", ex]);
        assert_eq!(o.status.code(), Some(0), "{ex}: {}", stdout(&o));
    }
}

#[test]
fn deform_from_a_literal() {
    let o = bin(&["deform", "--chi", "u^2", "--t", "-1", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tasks"].as_array().unwrap().len(), 3);
}

#[test]
fn cohomology_subcommand() {
    let o = bin(&[
        "cohomology",
        "--sheaf",
        "O(-4)",
        "--degree",
        "1",
        "--window",
        "-9:9",
        "--format",
        "structured",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tasks"][0]["values"]["dim"], 3);
    let o = bin(&["cohomology", "--format", "structured"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tasks"][0]["values"]["chi"], 8);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(bin(&["check"]).status.code(), Some(2));
    assert_eq!(
        bin(&["check", "--window", "5:1", "--example", "p1-trivial"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(bin(&["check", "/nonexistent/file.toml"]).status.code(), Some(2));
    assert_eq!(bin(&["verify-paper", "--only", "12"]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bin(&["deform", "--chi", "u^"]).status.code(), Some(2));
}

#[test]
fn verify_paper_subset() {
    let o = bin(&["verify-paper", "--only", "6,7"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("line-bundle-cohomology") && !s.contains("ks-pipeline"));
}
