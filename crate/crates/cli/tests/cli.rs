//! End-to-end checks of the command-line interface: output files, exit
//! codes, and byte-level determinism across reruns.

use std::fs;
use std::path::Path;
use std::process::Command;

fn slabsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slabsim"))
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn fixation_outputs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = tmp.path().join(sub);
        let status = slabsim()
            .args([
                "fixation",
                "--k",
                "2",
                "--L",
                "32",
                "--bc",
                "free",
                "--seed",
                "4",
                "--replicas",
                "2",
                "--t-max",
                "64",
                "--sample-interval",
                "16",
                "--snapshot-every",
                "32",
                "--out",
            ])
            .arg(&out)
            .status()
            .expect("binary runs");
        assert!(status.success());
        out
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(read(&a, "summary.json"), read(&b, "summary.json"));
    assert_eq!(read(&a, "series.csv"), read(&b, "series.csv"));
    assert_eq!(read(&a, "snapshot_r0_s0.txt"), read(&b, "snapshot_r0_s0.txt"));
    let summary = read(&a, "summary.json");
    assert!(summary.contains("\"command\": \"fixation\""));
    assert!(read(&a, "series.csv").starts_with("replica,t_sweeps,observable,value\n"));
}

#[test]
fn certify_roundtrip_through_snapshot_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let status = slabsim()
        .args([
            "blinker",
            "--k",
            "3",
            "--L",
            "64",
            "--bc",
            "free",
            "--construction",
            "event-a",
            "--seed",
            "2",
            "--replicas",
            "1",
            "--t-max",
            "8",
            "--sample-interval",
            "0",
            "--snapshot-every",
            "8",
            "--out",
        ])
        .arg(&out)
        .status()
        .expect("binary runs");
    assert!(status.success());

    // The initial snapshot carries the scaffold; its inventory certifies in
    // full, so certify exits 0.
    let snapshot = out.join("snapshot_r0_s0.txt");
    let certified = tmp.path().join("certified.txt");
    let status = slabsim()
        .args(["certify", "--snapshot"])
        .arg(&snapshot)
        .args(["--construction", "event-a", "--out-file"])
        .arg(&certified)
        .status()
        .expect("binary runs");
    assert_eq!(status.code(), Some(0));
    let body = fs::read_to_string(&certified).unwrap();
    assert_eq!(body.lines().count(), 2198);

    // Feeding the certified set back as an explicit candidate file is also
    // fully certified.
    let status = slabsim()
        .args(["certify", "--snapshot"])
        .arg(&snapshot)
        .arg("--candidate-file")
        .arg(&certified)
        .stdout(std::process::Stdio::null())
        .status()
        .expect("binary runs");
    assert_eq!(status.code(), Some(0));

    // A single-site candidate cannot carry a strict majority: exit 1.
    let single = tmp.path().join("single.txt");
    fs::write(&single, "5 5 1\n").unwrap();
    let status = slabsim()
        .args(["certify", "--snapshot"])
        .arg(&snapshot)
        .arg("--candidate-file")
        .arg(&single)
        .stdout(std::process::Stdio::null())
        .status()
        .expect("binary runs");
    assert_eq!(status.code(), Some(1));

    // An empty candidate is vacuously certified: empty output, exit 0.
    let empty = tmp.path().join("empty.txt");
    fs::write(&empty, "").unwrap();
    let out_file = tmp.path().join("empty_out.txt");
    let status = slabsim()
        .args(["certify", "--snapshot"])
        .arg(&snapshot)
        .arg("--candidate-file")
        .arg(&empty)
        .arg("--out-file")
        .arg(&out_file)
        .status()
        .expect("binary runs");
    assert_eq!(status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out_file).unwrap(), "");
}

#[test]
fn usage_errors_exit_two() {
    let status = slabsim().args(["fixation", "--bc", "diagonal"]).status().expect("binary runs");
    assert_eq!(status.code(), Some(2));
}

#[test]
fn invalid_geometry_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let status = slabsim()
        .args(["fixation", "--k", "1", "--L", "32", "--out"])
        .arg(tmp.path().join("x"))
        .status()
        .expect("binary runs");
    assert_eq!(status.code(), Some(1));
}
