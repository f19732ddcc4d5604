//! Binary-level checks: subcommands, config handling and exit codes.

use std::process::Command;

fn blowup() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blowup"))
}

#[test]
fn list_prints_the_catalog() {
    let out = blowup().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["remark33", "theorem11", "theorem12", "ode_constant", "mode_rates"] {
        assert!(text.contains(name), "catalog missing {name}");
    }
    assert!(text.contains("verifies:"));

    // filtered listing
    let out = blowup().args(["list", "theorem"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("theorem11") && text.contains("theorem12"));
    assert!(!text.contains("remark33"));
}

#[test]
fn validate_accepts_good_and_rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.cfg");
    std::fs::write(&good, "[scenario]\nname = remark33\n").unwrap();
    let out = blowup().arg("validate").arg(&good).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "[scenario]\nname = remark33\n[grid]\nn_points = 4\n").unwrap();
    let out = blowup().arg("validate").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("missing.cfg");
    let out = blowup().arg("validate").arg(&missing).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_produces_artifacts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // a fast passing run: constant data blowing up at t = 1/2
    let out_dir = dir.path().join("ode");
    let out = blowup()
        .args(["run", "ode_constant", "--t-end", "2", "--grid-n", "501", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("report.json").is_file());
    assert!(out_dir.join("trajectory.csv").is_file());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
    assert_eq!(report["config"]["name"], "ode_constant");

    // unknown scenario name
    let out = blowup().args(["run", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // assertion failure: stops before the blow-up it asserts
    let out_dir = dir.path().join("short");
    let out = blowup()
        .args(["run", "ode_constant", "--t-end", "0.2", "--grid-n", "501", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn run_from_config_file_with_custom_expression() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("custom.cfg");
    let out_dir = dir.path().join("out");
    std::fs::write(
        &cfg_path,
        format!(
            "[scenario]\nname = custom\n\n[initial]\nkind = custom\n\
             a0 = polynomial(3, 0, -4) * gaussian(1, 0, 1)\nb0 = polynomial(0, 2) * gaussian(1, 0, 1)\n\
             perturb = 0\n\n[grid]\nn_points = 401\nhalf_width = 8\n\n[solver]\nt_end = 0.05\n\n\
             [output]\ndir = {}\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let out = blowup().arg("run").arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("zeros.csv").is_file());
}
