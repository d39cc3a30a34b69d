//! Exit codes of the `hetsafe` binary.

use std::process::Command;

fn hetsafe(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hetsafe"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn missing_scenario_and_preset_prints_usage_and_exits_1() {
    let out = hetsafe(&[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn presets_run_cleanly() {
    for preset in ["circle6", "rect4"] {
        let dir = tempfile::tempdir().unwrap();
        let out = hetsafe(&[
            "--preset",
            preset,
            "--out-dir",
            dir.path().to_str().unwrap(),
            "--svg",
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{preset}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        for f in ["trajectory.csv", "metrics.json", "trajectory.svg"] {
            assert!(dir.path().join(f).is_file(), "{preset}: {f} missing");
        }
    }
}

#[test]
fn svg_only_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let out = hetsafe(&[
        "--preset",
        "headon2",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(!dir.path().join("trajectory.svg").exists());
}

#[test]
fn mode_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = hetsafe(&[
        "--preset",
        "headon2",
        "--mode",
        "centralized",
        "--out-dir",
        d,
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let m = std::fs::read_to_string(dir.path().join("metrics.json")).unwrap();
    assert!(m.contains("\"mode\": \"centralized\""));
}

#[test]
fn input_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cases = [
        (
            "unknown_key.json",
            r#"{"agents": [], "colour": 1}"#,
            "colour",
        ),
        ("not_json.json", "agents: []", "schema"),
        (
            "dup.json",
            r#"{"agents": [
                {"id": 4, "alpha": 1, "beta": 1, "radius": 0.1, "p0": [0, 0], "goal": [1, 0]},
                {"id": 4, "alpha": 1, "beta": 1, "radius": 0.1, "p0": [2, 0], "goal": [3, 0]}]}"#,
            "4",
        ),
    ];
    for (name, body, needle) in cases {
        let p = d.join(name);
        std::fs::write(&p, body).unwrap();
        let out = hetsafe(&[
            "--scenario",
            p.to_str().unwrap(),
            "--out-dir",
            d.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(1), "{name}");
        assert!(
            String::from_utf8_lossy(&out.stderr).contains(needle),
            "{name}"
        );
    }
    let out = hetsafe(&["--scenario", d.join("absent.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = hetsafe(&["--preset", "circle6", "--mode", "sideways"]);
    assert_eq!(out.status.code(), Some(1));
    let out = hetsafe(&["--preset", "circle6", "--scenario", "x.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn starting_outside_the_barrier_set_exits_2() {
    // Clear of each other but closing too fast to stop: h < 0 from the start.
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("closing.json");
    std::fs::write(
        &p,
        r#"{"t_end": 5, "agents": [
            {"id": 1, "alpha": 0.1, "beta": 0.6, "radius": 0.2, "p0": [-0.25, 0], "v0": [0.6, 0], "goal": [2, 0]},
            {"id": 2, "alpha": 0.1, "beta": 0.6, "radius": 0.2, "p0": [0.25, 0], "v0": [-0.6, 0], "goal": [-2, 0]}]}"#,
    )
    .unwrap();
    let out = hetsafe(&[
        "--scenario",
        p.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let m = std::fs::read_to_string(dir.path().join("metrics.json")).unwrap();
    assert!(m.contains("\"safe\": false"));
}
