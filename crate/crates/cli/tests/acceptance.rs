//! CLI acceptance: report determinism (criterion 12) and the exit-code
//! contract (0 pass, 1 check failure, 2 usage error, 3 domain error).

use std::process::{Command, Output};

fn frac2d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frac2d"))
        .args(args)
        .env_remove("FRAC2D_NODES")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

// 12. Two runs of the identity suite produce byte-identical CSV.
#[test]
fn criterion_12_identity_suite_deterministic() {
    let a = frac2d(&["identity-suite"]);
    let b = frac2d(&["identity-suite"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "identity-suite CSV differs between runs");
    assert!(!a.stdout.is_empty());

    // determinism must also hold for a quadrature-heavy report
    let args = [
        "deriv", "--kind", "rl", "--alpha", "0.5", "--axis", "x",
        "--field", "0.7,1.3,2.0", "--point", "1.1,0.9", "--point", "0.4,1.7",
    ];
    let c = frac2d(&args);
    let d = frac2d(&args);
    assert!(c.status.success());
    assert_eq!(c.stdout, d.stdout, "deriv CSV differs between runs");
    println!("criterion 12 (byte-identical reports across runs): PASS");
}

#[test]
fn deriv_reference_values() {
    let out = frac2d(&[
        "deriv", "--kind", "caputo", "--alpha", "0.5", "--axis", "x",
        "--field", "r2", "--point", "1,1",
    ]);
    assert!(out.status.success());
    // [DERIVED] 2/Gamma(2.5) = 1.5045055561... at 10 significant digits
    assert!(stdout(&out).contains("1.504505556"), "got: {}", stdout(&out));

    let out = frac2d(&[
        "deriv", "--kind", "rl", "--alpha", "0.5", "--axis", "x",
        "--field", "r2", "--point", "1,1",
    ]);
    // [DERIVED] 2/Gamma(2.5) + 1/Gamma(0.5) = 2.0686951396...
    assert!(stdout(&out).contains("2.06869514"), "got: {}", stdout(&out));

    let out = frac2d(&[
        "deriv", "--kind", "caputo", "--alpha", "0.5", "--field", "const1",
        "--point", "1,1",
    ]);
    // [TRIVIAL] Caputo annihilates constants
    assert!(stdout(&out).lines().nth(1).unwrap().ends_with(",0"));
}

#[test]
fn exit_zero_on_passing_check() {
    let out = frac2d(&[
        "transform-check", "--law", "rl", "--alpha", "0.5", "--field", "r2",
        "--phi", "0.04", "--point", "1,2",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("true"));
}

#[test]
fn exit_one_on_failed_check() {
    // at a large angle the higher-order remainder terms dominate and the
    // Richardson ratio leaves [3, 5]
    let out = frac2d(&[
        "transform-check", "--law", "rl", "--alpha", "0.5", "--field", "r2",
        "--phi", "0.7", "--point", "1,8",
    ]);
    assert_eq!(out.status.code(), Some(1), "stdout: {}", stdout(&out));
}

#[test]
fn exit_two_on_usage_errors() {
    // unknown flag (clap)
    let out = frac2d(&["deriv", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    // malformed point
    let out = frac2d(&[
        "deriv", "--alpha", "0.5", "--field", "r2", "--point", "banana",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // unknown invariant expression
    let out = frac2d(&[
        "invariant-scan", "--expr", "nope", "--alpha", "0.5", "--field", "r2",
        "--point", "1,1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // bad config file
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "nodes = plenty\n").unwrap();
    let out = frac2d(&["identity-suite", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_three_on_domain_errors() {
    // wedge violation under rotation
    let out = frac2d(&[
        "transform-check", "--law", "rl", "--alpha", "0.5", "--field", "r2",
        "--phi", "0.04", "--point", "1,0.001",
    ]);
    assert_eq!(out.status.code(), Some(3));
    // non-positive integration-axis coordinate
    let out = frac2d(&[
        "deriv", "--alpha", "0.5", "--axis", "x", "--field", "r2",
        "--point", "0,1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    // Caputo law outside its order range
    let out = frac2d(&[
        "transform-check", "--law", "caputo", "--alpha", "1.5", "--field", "r2",
        "--phi", "0.04", "--point", "1,1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_and_env_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "precision = 4\nformat = csv\n# comment\nnodes = 96\n").unwrap();

    let args = [
        "deriv", "--kind", "caputo", "--alpha", "0.5", "--axis", "x",
        "--field", "r2", "--point", "1,1",
    ];
    // config file sets precision 4
    let out = Command::new(env!("CARGO_BIN_EXE_frac2d"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .env_remove("FRAC2D_NODES")
        .output()
        .unwrap();
    assert!(stdout(&out).contains("1.505"), "got: {}", stdout(&out));
    assert!(!stdout(&out).contains("1.504505556"));

    // flag wins over config file
    let out = Command::new(env!("CARGO_BIN_EXE_frac2d"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .args(["--precision", "10"])
        .env_remove("FRAC2D_NODES")
        .output()
        .unwrap();
    assert!(stdout(&out).contains("1.504505556"), "got: {}", stdout(&out));

    // env var sets the node count; an invalid value is a usage error
    let out = Command::new(env!("CARGO_BIN_EXE_frac2d"))
        .args(args)
        .env("FRAC2D_NODES", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // config file overrides the env var (precedence: flags > config > env)
    let out = Command::new(env!("CARGO_BIN_EXE_frac2d"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .env("FRAC2D_NODES", "3") // would be rejected if it won
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn json_format_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = frac2d(&[
        "invariant-scan", "--expr", "q2", "--alpha", "0.5", "--field", "r2",
        "--phi", "0,0.02", "--point", "1,1", "--format", "json",
        "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    assert!(parsed.as_array().map(|a| !a.is_empty()).unwrap_or(false));
}
