//! Acceptance gate for the command-line layer: repeated runs with the same
//! seed must reproduce their artifacts byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_combtime"))
}

fn fresh_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("combtime-acc-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn gate(criterion: &str, ok: bool, detail: &str) {
    println!("[{}] {criterion}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{criterion}: {detail}");
}

fn run_to(out: &Path, args: &[&str]) {
    let output = bin()
        .args(["--out", out.to_str().unwrap()])
        .args(args)
        .output()
        .expect("spawn combtime");
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn criterion_6f_fixed_seed_runs_are_byte_identical() {
    let base = fresh_dir("determinism");
    let cfg = base.join("small.toml");
    fs::write(
        &cfg,
        "[sa]\nrbw_khz = 100.0\nn_averages = 32\n\n[sim]\nsample_rate_mhz = 10.0\nduration_s = 0.04\nseed = 12345\n",
    )
    .unwrap();

    let timing_args = [
        "--config",
        cfg.to_str().unwrap(),
        "--emit",
        "csv,svg",
        "timing",
    ];
    let t1 = base.join("t1");
    let t2 = base.join("t2");
    run_to(&t1, &timing_args);
    run_to(&t2, &timing_args);
    let a = fs::read(t1.join("timing.csv")).unwrap();
    let b = fs::read(t2.join("timing.csv")).unwrap();
    let timing_identical = a == b;
    let svg_a = fs::read(t1.join("timing_spectrum.svg")).unwrap();
    let svg_b = fs::read(t2.join("timing_spectrum.svg")).unwrap();
    let svg_identical = svg_a == svg_b;

    let scan_args = [
        "--preset",
        "paper-vacuum",
        "phase-scan",
        "--n-points",
        "41",
        "--draws-per-point",
        "5000",
    ];
    let s1 = base.join("s1");
    let s2 = base.join("s2");
    run_to(&s1, &scan_args);
    run_to(&s2, &scan_args);
    let c = fs::read(s1.join("phase_scan.csv")).unwrap();
    let d = fs::read(s2.join("phase_scan.csv")).unwrap();
    let scan_identical = c == d;

    gate(
        "criterion 6f",
        timing_identical && svg_identical && scan_identical,
        &format!(
            "timing.csv identical: {timing_identical} ({} bytes), spectrum svg identical: {svg_identical}, phase_scan.csv identical: {scan_identical} ({} bytes)",
            a.len(),
            c.len()
        ),
    );
}
