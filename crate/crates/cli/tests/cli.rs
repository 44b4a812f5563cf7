use std::fs;
use std::path::Path;
use std::process::Command;

fn qra() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qra"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn swap_rotation_run_writes_outputs_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "overlap_steps = 11\n");
    let out = tmp.path().join("results");

    let output = qra()
        .args(["swap_rotation", "--config"])
        .arg(&config)
        .args(["--seed", "7", "--out"])
        .arg(&out)
        .args(["--trials", "4000"])
        .output()
        .unwrap();

    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(
        output.status.success(),
        "expected exit 0, got {:?}\n{stdout}",
        output.status.code()
    );
    assert!(stdout.contains("PASS"), "no check lines in:\n{stdout}");

    let rows = fs::read_to_string(out.join("swap_rotation_rows.csv")).unwrap();
    assert!(rows.starts_with("experiment,params,measured,analytic,std_err,trials,seed\n"));
    assert!(rows.lines().count() > 11);

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("swap_rotation_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["command"], "swap_rotation");
    assert_eq!(summary["seed"], 7);
    assert_eq!(summary["passed"], true);
}

#[test]
fn same_seed_gives_identical_output_files() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "overlap_steps = 5\n");
    let mut runs = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        let status = qra()
            .args(["swap_rotation", "--config"])
            .arg(&config)
            .args(["--seed", "42", "--out"])
            .arg(&out)
            .args(["--trials", "500"])
            .status()
            .unwrap();
        assert!(status.success());
        runs.push(fs::read_to_string(out.join("swap_rotation_rows.csv")).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn unknown_config_key_is_an_operational_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "not_a_real_knob = 3\n");
    let output = qra()
        .args(["swap_rotation", "--config"])
        .arg(&config)
        .args(["--seed", "1", "--out"])
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(!String::from_utf8(output.stderr).unwrap().is_empty());
}

#[test]
fn unknown_command_is_an_operational_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "");
    let output = qra()
        .args(["frobnicate", "--config"])
        .arg(&config)
        .args(["--seed", "1", "--out"])
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}
