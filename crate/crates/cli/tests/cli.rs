//! End-to-end checks of the command-line interface: exit codes, file
//! formats and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entglkit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("entglkit_cli_{}_{name}", std::process::id()));
    p
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn zoo_chessboard_roundtrips_through_check() {
    let path = tmp("chessboard.json");
    let out = run(&[
        "zoo",
        "--family",
        "chessboard",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&["check", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"ppt\":true"), "{text}");
    // realignment norm 7/6
    assert!(text.contains("\"realignment_norm\":1.16666666"), "{text}");
    std::fs::remove_file(path).ok();
}

#[test]
fn zoo_werner_npt_detected_by_check_and_distill() {
    let path = tmp("werner.json");
    let out = run(&[
        "zoo", "--family", "werner", "--d", "3", "--beta", "-0.6", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&["check", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("\"ppt\":false"));
    // detected => exit 0
    let out = run(&[
        "distill",
        path.to_str().unwrap(),
        "--tests",
        "200",
        "--opt-steps",
        "10",
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("\"detected\":true"));
    std::fs::remove_file(path).ok();
}

#[test]
fn distill_ppt_exits_ten_and_seed_repeat_is_byte_identical() {
    let path = tmp("stormer.json");
    let out = run(&[
        "zoo", "--family", "stormer", "--alpha", "2.5", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let args = [
        "distill",
        path.to_str().unwrap(),
        "--tests",
        "100",
        "--opt-steps",
        "5",
        "--seed",
        "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(10));
    assert_eq!(a.stdout, b.stdout);
    std::fs::remove_file(path).ok();
}

#[test]
fn classify_counts() {
    for (r, expect) in [("2", "3.0"), ("3", "7.0")] {
        let out = run(&["classify-permutations", "--parties", r]);
        assert!(out.status.success());
        let text = stdout(&out);
        assert!(
            text.contains(&format!("\"orbit_count\":{expect}")),
            "{text}"
        );
    }
    let out = run(&["classify-permutations", "--parties", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn volume_smoke_run() {
    let csv_path = tmp("volume.csv");
    let start = std::time::Instant::now();
    let out = run(&[
        "volume",
        "--dim",
        "3",
        "--states",
        "100",
        "--tests",
        "50",
        "--seed",
        "3",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(start.elapsed().as_secs() < 30);
    let text = stdout(&out);
    assert!(text.contains("\"frac_ppt\":"));
    let csv = std::fs::read_to_string(&csv_path).expect("csv written");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("test_index,cumulative_fraction"));
    let mut prev = -1.0f64;
    for line in lines {
        let mut parts = line.split(',');
        let _idx: usize = parts.next().unwrap().parse().unwrap();
        let frac: f64 = parts.next().unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&frac));
        assert!(frac >= prev);
        prev = frac;
    }
    std::fs::remove_file(csv_path).ok();
}

#[test]
fn zoo_invalid_params_exit_two() {
    let out = run(&["zoo", "--family", "werner", "--d", "3", "--beta", "-2.0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["zoo", "--family", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_malformed_json_exits_three() {
    let path = tmp("garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    std::fs::remove_file(path).ok();
}

#[test]
fn check_invalid_state_exits_four() {
    let path = tmp("invalid.json");
    // not Hermitian
    std::fs::write(
        &path,
        r#"{"dims":[2,2],"data":[[1,0],[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}"#,
    )
    .unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    std::fs::remove_file(path).ok();
}

#[test]
fn protocol_curves() {
    let out = run(&["protocol", "--name", "recurrence", "--y0", "0.65"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[1] > w[0]));
    assert!(1.0 - values.last().unwrap() < 1e-6);

    let out = run(&[
        "protocol", "--name", "qpa", "--p00", "1", "--p01", "0", "--p10", "0", "--p11", "0",
        "--rounds", "4",
    ]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        assert!(line.ends_with(",1.0"), "{line}");
    }

    let out = run(&[
        "protocol", "--name", "breeding", "--p00", "0.25", "--p01", "0.25", "--p10", "0.25",
        "--p11", "0.25",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("clamped,0.0"), "{text}");

    let out = run(&["protocol", "--name", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn witness_emission() {
    let state_path = tmp("chess_w.json");
    let witness_path = tmp("witness.json");
    let out = run(&[
        "zoo",
        "--family",
        "chessboard",
        "--out",
        state_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&[
        "check",
        state_path.to_str().unwrap(),
        "--witness-out",
        witness_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("witness.json"));
    let raw = std::fs::read_to_string(&witness_path).expect("witness written");
    assert!(raw.contains("\"dims\":[3,3]"));
    std::fs::remove_file(state_path).ok();
    std::fs::remove_file(witness_path).ok();
}
