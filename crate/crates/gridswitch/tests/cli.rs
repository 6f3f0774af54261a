//! Black-box tests of the command-line interface: subcommands, output
//! files, exit codes, and run-to-run determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gridswitch"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.toml"))
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn simulate_writes_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["simulate"])
        .arg(scenario("two_bus"))
        .args(["--t-end", "5", "--svg", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for suffix in ["trajectory.csv", "events.csv", "metrics.csv", "omega.svg"] {
        assert!(
            dir.path().join(format!("two_bus_{suffix}")).exists(),
            "missing {suffix}"
        );
    }
    let csv = std::fs::read_to_string(dir.path().join("two_bus_trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,ell,omega_1,omega_2,eta_1_2,d_c_1,d_c_2,sigma_1,sigma_2,V"
    );
    // the run starts at rest: t = 0, no jumps, zero frequency
    assert!(lines.next().unwrap().starts_with("0,0,0,0,"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["a", "b"] {
        let out = bin()
            .args(["simulate"])
            .arg(scenario("two_bus"))
            .args(["--t-end", "5", "--out-dir"])
            .arg(dir.path().join(sub))
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    for suffix in ["trajectory.csv", "events.csv", "metrics.csv"] {
        let a = std::fs::read(dir.path().join("a").join(format!("two_bus_{suffix}"))).unwrap();
        let b = std::fs::read(dir.path().join("b").join(format!("two_bus_{suffix}"))).unwrap();
        assert_eq!(a, b, "{suffix} differs between identical runs");
    }
}

#[test]
fn scenario_errors_exit_with_code_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "name = \"bad\"\nvoltage_dynamics = true\n").unwrap();
    let out = bin().args(["simulate"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn failed_check_exits_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["simulate"])
        .arg(scenario("two_bus"))
        .args(["--t-end", "2", "--check", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn equilibrium_reports_secure_network() {
    let out = bin()
        .args(["equilibrium"])
        .arg(scenario("two_bus"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("secure,1"), "{text}");
    assert!(text.contains("s_star_1,"), "{text}");
}

#[test]
fn passivity_passes_bundled_supplies() {
    let out = bin()
        .args(["passivity"])
        .arg(scenario("two_bus"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.matches(",pass,").count(), 2, "{text}");
}

#[test]
fn compare_prints_three_variant_rows() {
    let out = bin()
        .args(["compare"])
        .arg(scenario("two_bus"))
        .args(["--t-end", "5"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("variant,peak_abs_omega"));
    let variants: Vec<&str> = lines
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(variants, ["none", "switching", "hysteresis"]);
}

#[test]
fn report_prints_metrics_table() {
    let out = bin()
        .args(["report"])
        .arg(scenario("two_bus"))
        .args(["--t-end", "5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("metric,bus,value\n"));
    assert!(text.contains("peak_abs_omega,2,"), "{text}");
}

#[test]
fn mode_override_is_validated() {
    // forcing filippov mode on a hysteresis scenario is a scenario error
    let out = bin()
        .args(["report"])
        .arg(scenario("two_bus"))
        .args(["--mode", "filippov"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
