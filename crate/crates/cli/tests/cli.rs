//! Process-level tests of the command-line interface: exit codes, report
//! schema, determinism and case-file loading.

use std::process::{Command, Output};

fn conecheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conecheck"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn passing_check_exits_zero_with_json_report() {
    let out = conecheck(&[
        "check",
        "round_sphere:2+harmonic_deg2",
        "gt_residual",
        "--c",
        "1",
        "--points",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let line = stdout.lines().next().unwrap();
    let report: serde_json::Value = serde_json::from_str(line).unwrap();
    assert_eq!(report["case_id"], "round_sphere:2");
    assert_eq!(report["verdict"], "pass");
    assert!(report["max_residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(report["seed"], 42);
    // runtime is measured but never serialized: reports are fixtures.
    assert!(report.get("runtime_ms").is_none());
    // Floats carry 17 significant digits in scientific notation.
    assert!(
        line.contains("\"tolerance\":1.0000000000000001e-9"),
        "tolerance formatting: {line}"
    );
}

#[test]
fn failing_check_exits_one() {
    let out = conecheck(&[
        "check",
        "round_sphere:2+harmonic_deg1",
        "parallel_hessian",
        "--points",
        "40",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let report: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    assert_eq!(report["verdict"], "fail");
}

#[test]
fn unknown_case_and_check_exit_two() {
    let out = conecheck(&["check", "no_such_case", "gt_residual"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown case"));

    let out = conecheck(&["check", "flat:2,0", "no_such_check"]);
    assert_eq!(out.status.code(), Some(2));

    let out = conecheck(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_command_and_seed_give_identical_bytes() {
    let args = [
        "check",
        "round_sphere:2+harmonic_deg2",
        "gt_residual",
        "--c",
        "1",
        "--seed",
        "7",
        "--points",
        "60",
    ];
    let a = conecheck(&args);
    let b = conecheck(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
    // A different seed samples different points.
    let c = conecheck(&[
        "check",
        "round_sphere:2+harmonic_deg2",
        "gt_residual",
        "--c",
        "1",
        "--seed",
        "8",
        "--points",
        "60",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn case_files_load_and_run() {
    let dir = std::env::temp_dir().join("conecheck_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sphere_case.json");
    std::fs::write(
        &path,
        r#"{
          "id": "file_sphere",
          "coordinates": ["x", "y"],
          "signature": [2, 0],
          "sample_box": [[-2.0, 2.0], [-2.0, 2.0]],
          "metric": [
            ["4 / pow(1 + x*x + y*y, 2)", "0"],
            ["0", "4 / pow(1 + x*x + y*y, 2)"]
          ],
          "scalars": { "alpha": "2*x / (1 + x*x + y*y)" }
        }"#,
    )
    .unwrap();
    let out = conecheck(&[
        "check",
        path.to_str().unwrap(),
        "obata_residual",
        "--alpha",
        "alpha",
        "--points",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let report: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    assert_eq!(report["case_id"], "file_sphere");
    assert_eq!(report["verdict"], "pass");
}

#[test]
fn matrices_verb_reports_certificates() {
    let out = conecheck(&["matrices", "icosahedral_group"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("no_nondegenerate_splitting_certified"));

    let out = conecheck(&["matrices", "o2xo2_group"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("splitting_found_ranks_2_2"));
}

#[test]
fn octant_holonomy_matches_the_area() {
    let out = conecheck(&[
        "holonomy",
        "round_sphere:2",
        "--loop",
        "octant",
        "--steps",
        "4096",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let report: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    let angle = report["details"][0]["value"].as_f64().unwrap();
    assert!((angle.abs() - std::f64::consts::FRAC_PI_2).abs() < 1e-4);
}

#[test]
fn suite_runs_the_whole_battery() {
    let out = conecheck(&["suite"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 11, "one JSON line per criterion");
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["passed"], true, "criterion {} failed", v["criterion"]);
        assert!(v["checks"].as_array().unwrap().len() >= 2);
    }
}

#[test]
fn text_format_is_human_readable() {
    let out = conecheck(&[
        "check",
        "flat:2,0",
        "gt_residual",
        "--alpha",
        "const",
        "--c",
        "0",
        "--format",
        "text",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("pass"));
    assert!(!stdout.contains('{'));
}
