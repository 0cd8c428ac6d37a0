use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use auq::io::{parse_solution, parse_trace, parse_truth};
use auq::optim::{pose_error, SolveStatus};

fn auq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_auq"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run auq")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn calibrate_recovers_generated_truth() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(auq(
        d,
        &[
            "gen",
            "--problem",
            "handeye",
            "-m",
            "5",
            "--seed",
            "7",
            "-o",
            "p.txt"
        ]
    )
    .status
    .success());
    let out = auq(
        d,
        &[
            "calibrate",
            "p.txt",
            "-o",
            "p.sol",
            "--truth",
            "p.txt.truth",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("pose error x"));

    let sol = parse_solution(&fs::read_to_string(d.join("p.sol")).unwrap()).unwrap();
    let truth = parse_truth(&fs::read_to_string(d.join("p.txt.truth")).unwrap()).unwrap();
    assert_eq!(sol.status, SolveStatus::Converged);
    let (rot, tr) = pose_error(&sol.blocks[0].1, &truth[0].1);
    assert!(rot <= 1e-6 && tr <= 1e-6);
}

#[test]
fn parse_errors_exit_with_two_and_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.txt"), "SIGMA 1\nEDGE 0 1 1 0 0 0 0 0\n").unwrap();
    let out = auq(d, &["slam", "bad.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    fs::write(d.join("zero.txt"), "SIGMA 0\n").unwrap();
    assert_eq!(auq(d, &["calibrate", "zero.txt"]).status.code(), Some(2));
    assert_eq!(auq(d, &["calibrate", "missing.txt"]).status.code(), Some(1));
}

#[test]
fn non_convergence_exits_with_three_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = [
        "gen",
        "--problem",
        "posegraph",
        "-n",
        "6",
        "--rot-sigma",
        "0.1",
        "--trans-sigma",
        "0.1",
        "-o",
        "g.txt",
    ];
    assert!(auq(d, &gen).status.success());
    let out = auq(
        d,
        &[
            "slam",
            "g.txt",
            "-o",
            "g.sol",
            "--restarts",
            "1",
            "--max-iters",
            "1",
            "--tolerance",
            "1e-300",
        ],
    );
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let sol = parse_solution(&fs::read_to_string(d.join("g.sol")).unwrap()).unwrap();
    assert_ne!(sol.status, SolveStatus::Converged);
    assert_eq!(sol.blocks.len(), 6);
}

#[test]
fn disconnected_pose_graph_warns() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let id = "1 0 0 0 0 0 0";
    fs::write(d.join("g.txt"), format!("EDGE 0 1 {id}\nEDGE 2 3 {id}\n")).unwrap();
    let out = auq(d, &["slam", "g.txt", "-o", "g.sol"]);
    assert!(stderr(&out).contains("disconnected"));
}

#[test]
fn wrong_problem_kind_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(auq(
        d,
        &[
            "gen",
            "--problem",
            "handeye-world",
            "-m",
            "3",
            "-o",
            "w.txt"
        ]
    )
    .status
    .success());
    assert_eq!(auq(d, &["calibrate", "w.txt"]).status.code(), Some(2));
    assert!(auq(d, &["calibrate-world", "w.txt"]).status.success());
}

#[test]
fn simulate_writes_a_decaying_trace() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // Pure translation error, where the decay is exactly exp(-k t).
    let out = auq(
        d,
        &[
            "simulate",
            "--x0",
            "1,0,0,0,0,0,0",
            "--xd",
            "1,0,0,0,1,-2,0.5",
            "--kt",
            "2",
            "--dt",
            "1e-3",
            "--steps",
            "1000",
            "-o",
            "t.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = parse_trace(&fs::read_to_string(d.join("t.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 1001);
    let (v0, vt) = (rows[0][8], rows[1000][8]);
    assert!((vt / v0 - (-4.0f64).exp()).abs() < 1e-9);

    let out = auq(d, &["simulate", "--x0", "1,0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn probe_reports_jumps_near_two_pi() {
    let dir = tempfile::tempdir().unwrap();
    let out = auq(
        dir.path(),
        &["probe", "--axis", "0,0,1", "--deltas", "1e-6"],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().last().unwrap();
    let jumps: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
    let floor = std::f64::consts::TAU - 1e-3;
    assert!(jumps[1] > floor && jumps[2] > floor);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [a.path(), b.path()] {
        let gen = [
            "gen",
            "--problem",
            "posegraph",
            "-n",
            "8",
            "--rot-sigma",
            "0.01",
            "--trans-sigma",
            "0.01",
            "--seed",
            "5",
            "-o",
            "g.txt",
        ];
        assert!(auq(d, &gen).status.success());
        assert!(auq(d, &["slam", "g.txt", "-o", "g.sol", "--seed", "2"])
            .status
            .success());
    }
    for f in ["g.txt", "g.txt.truth", "g.sol"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}
