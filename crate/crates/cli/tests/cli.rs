use std::fs;
use std::process::{Command, Output};

use blockfade::{read_csv, Bound, HEADER};

fn blockfade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockfade"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

#[test]
fn coherent_capacity_to_stdout() {
    let out = blockfade(&["--bound", "C_coh", "--snr-db", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], HEADER.join(","));
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("10,1,0,0,0.001,C_coh,2.90651"));
    assert!(lines[1].ends_with(",,,"));
    assert!(text.ends_with('\n'));
}

#[test]
fn t_equal_one_is_a_usage_error() {
    let out = blockfade(&["--bound", "L", "--T", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("T >= 2"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_flags_fail_before_any_work() {
    let out = blockfade(&["--bound", "nope"]);
    assert!(!out.status.success());
    let out = blockfade(&["--sweep-T", "10:2", "--n", "100", "--bound", "L"]);
    assert!(!out.status.success());
}

#[test]
fn sweep_to_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = blockfade(&[
        "--sweep-T",
        "2:20:6",
        "--n",
        "400",
        "--bound",
        "L,U,na_coh",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let rows = read_csv(&path).unwrap();
    let ts: Vec<u32> = rows.iter().map(|r| r.t).collect();
    assert_eq!(ts, vec![2, 2, 2, 8, 8, 8, 14, 14, 14, 20, 20, 20]);
    for pair in rows.chunks(3) {
        assert_eq!(pair[0].bound, Bound::L);
        assert!(pair[0].rate_bits_per_cu <= pair[1].rate_bits_per_cu);
    }
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.matches("snr_db").count(), 1);
}

#[test]
fn unwritable_destination_names_the_path() {
    let out = blockfade(&["--bound", "C_coh", "--out", "/no/such/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/dir/x.csv"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "snr-db = 0\nT = 10\nbound = L\n").unwrap();
    let base = blockfade(&["--config", cfg.to_str().unwrap()]);
    assert!(base.status.success());
    let over = blockfade(&["--config", cfg.to_str().unwrap(), "--snr-db", "10"]);
    let a = String::from_utf8(base.stdout).unwrap();
    let b = String::from_utf8(over.stdout).unwrap();
    assert!(a.lines().nth(1).unwrap().starts_with("0,10,"));
    assert!(b.lines().nth(1).unwrap().starts_with("10,10,"));
}

#[test]
fn monte_carlo_rows_repeat_for_a_seed_and_any_thread_count() {
    let args = [
        "--bound",
        "dt,na_noncoh",
        "--T",
        "10",
        "--n",
        "200",
        "--epsilon",
        "0.05",
        "--samples",
        "20000",
        "--seed",
        "42",
    ];
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_blockfade"))
            .args(args)
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("1"));
    assert_eq!(one, run("4"));
    let text = String::from_utf8(one).unwrap();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[8], "20000");
        assert!(!fields[7].is_empty() && !fields[9].is_empty());
    }
}

#[test]
fn find_tstar_reports_on_stderr() {
    let out = blockfade(&["--find-tstar", "--bound", "L", "--n", "100", "--sweep-T", "2:8:2"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("T* = 8"));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 5);
}
