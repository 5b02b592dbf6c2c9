use std::process::Command;

fn satarch() -> Command {
    Command::new(env!("CARGO_BIN_EXE_satarch"))
}

#[test]
fn help_lists_every_command() {
    let out = satarch().arg("--help").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for cmd in ["simulate", "train", "optimize", "sweep", "report"] {
        assert!(text.contains(cmd), "help lacks {cmd}");
    }
}

#[test]
fn missing_scenario_file_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = satarch()
        .args(["--scenario", "no/such/file.json", "--out"])
        .arg(dir.path())
        .arg("simulate")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn malformed_sweep_case_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = satarch()
        .args(["--out"])
        .arg(dir.path())
        .args(["sweep", "--cases", "3x5"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("3x5"));
}

#[test]
fn report_on_empty_directory_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let out = satarch().arg("--out").arg(dir.path()).arg("report").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("report.txt").exists());
}
