//! Command-line acceptance checks: determinism, file round-trips and the
//! guard/error paths (criterion 11 of the suite; criteria 1-10 live with
//! the core crate).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_trapspin")
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("trapspin-test-{}-{tag}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn check(criterion: &str, pass: bool, detail: String) {
    println!(
        "[{}] criterion {criterion}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion}: {detail}");
}

#[test]
fn criterion_11_determinism_and_round_trip() {
    let dir = scratch_dir("determinism");
    let cfg = config_path("suppress2to6.cfg");
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out in [&out_a, &out_b] {
        let o = run(&[
            "report",
            cfg.to_str().unwrap(),
            "--strict",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(
            o.status.success(),
            "report run failed: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let mut identical = true;
    for name in ["schedule.txt", "report.csv", "report.txt", "error_vs_t.dat"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        identical &= a == b;
    }

    // Round-trip of the exported schedule through the dedicated command.
    let schedule = out_a.join("schedule.txt");
    let rt = run(&["roundtrip", schedule.to_str().unwrap()]);
    let roundtrip_ok = rt.status.success();

    check(
        "11 determinism-roundtrip",
        identical && roundtrip_ok,
        format!("byte-identical artifacts across runs: {identical}; schedule round-trip exit ok: {roundtrip_ok}"),
    );
}

#[test]
fn runtime_guard_rejects_oversized_chains_without_output() {
    let dir = scratch_dir("guard");
    let cfg_text = fs::read_to_string(config_path("suppress2to6.cfg"))
        .unwrap()
        .replace("n = 8", "n = 20");
    let cfg = dir.join("big.cfg");
    fs::write(&cfg, cfg_text).unwrap();
    let out = dir.join("out");
    let o = run(&[
        "verify",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("runtime guard"), "stderr: {stderr}");
    assert!(!out.exists(), "guard must not leave partial output");
}

#[test]
fn dipole_ising_report_has_no_pulses_and_a_budget_in_band() {
    let dir = scratch_dir("dipole");
    let out = dir.join("out");
    let o = run(&[
        "report",
        config_path("ising_dipole.cfg").to_str().unwrap(),
        "--strict",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("compiled pulse count: 0"), "{report}");
    let budget: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("spin-motion error budget: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((1e-3..=3e-3).contains(&budget), "budget {budget}");
    // The driven free evolution is its own ideal evolution.
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let phase_err: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert!(phase_err < 1e-10, "{line}");
    }
}

#[test]
fn xy_report_reproduces_exponent_and_iteration_bound() {
    let dir = scratch_dir("xy");
    let out = dir.join("out");
    let o = run(&[
        "report",
        config_path("xy_model.cfg").to_str().unwrap(),
        "--strict",
        "--seedless",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        o.status.success(),
        "strict xy report failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("iteration bound m: 104"), "{report}");
    let exponent: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("fitted error exponent: "))
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((exponent - 5.0).abs() <= 0.3, "exponent {exponent}");
    // Plot data files exist with one row per sweep point plus headers.
    let sweep = fs::read_to_string(out.join("error_vs_t.dat")).unwrap();
    assert_eq!(sweep.lines().count(), 1 + 5);
    assert!(out.join("fn_fit.dat").exists());
}

#[test]
fn truncated_schedule_reports_the_break_line() {
    let dir = scratch_dir("truncated");
    let cfg = config_path("suppress2to6.cfg");
    let out = dir.join("out");
    let o = run(&[
        "compile",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let schedule_path = out.join("schedule.txt");
    let full = fs::read_to_string(&schedule_path).unwrap();
    let keep: String = full.lines().take(10).map(|l| format!("{l}\n")).collect();
    fs::write(&schedule_path, keep).unwrap();
    let o = run(&["roundtrip", schedule_path.to_str().unwrap()]);
    assert!(!o.status.success());
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("line 11"), "stderr: {stderr}");
}

#[test]
fn negative_free_duration_names_the_step() {
    let dir = scratch_dir("negative");
    let text = "SCHEDULE v1\nN 4\nJZ 2\nFRAME IP\nDRIVE_ETA 0\n\
                TARGET SUPPRESS2 order=1 span=0.01 iterations=1\nSTEPS 3\n\
                FREE 0.01 0\nPULSE FLIPX ODD\nFREE -0.25 0\nEND\n";
    let path = dir.join("bad.sched");
    fs::write(&path, text).unwrap();
    let o = run(&["roundtrip", path.to_str().unwrap()]);
    assert!(!o.status.success());
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(
        stderr.contains("step 3") && stderr.contains("line 10"),
        "stderr: {stderr}"
    );
}

#[test]
fn strict_mode_fails_on_unmet_expectations() {
    let dir = scratch_dir("strict");
    // An exact sequence has roundoff-level error at every span; its fitted
    // exponent is meaningless and cannot sit near 5.
    let cfg_text = fs::read_to_string(config_path("suppress2to6.cfg"))
        .unwrap()
        .replace(
            "jz_t_values = 0.05, 0.1, 0.2",
            "jz_t_values = 0.05, 0.1, 0.2\nexpect_exponent = 5.0, 0.3",
        );
    let cfg = dir.join("strict.cfg");
    fs::write(&cfg, cfg_text).unwrap();
    let out = dir.join("out");
    let lenient = run(&[
        "verify",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(lenient.status.success(), "without --strict the run passes");
    let strict = run(&[
        "verify",
        cfg.to_str().unwrap(),
        "--strict",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn max_n_flag_moves_but_cannot_exceed_the_dense_cap() {
    let dir = scratch_dir("maxn");
    let cfg_text = fs::read_to_string(config_path("suppress2to6.cfg"))
        .unwrap()
        .replace("n = 8", "n = 13")
        .replace("jz_t_values = 0.05, 0.1, 0.2", "");
    let cfg = dir.join("wide.cfg");
    fs::write(&cfg, cfg_text).unwrap();
    let out = dir.join("out");
    // Default cap (12) refuses 13 spins; raising it admits the run.
    let refused = run(&[
        "compile",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!refused.status.success());
    let allowed = run(&[
        "compile",
        cfg.to_str().unwrap(),
        "--max-n",
        "13",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        allowed.status.success(),
        "{}",
        String::from_utf8_lossy(&allowed.stderr)
    );
    // The dense-representation cap is absolute.
    let cfg20 = dir.join("huge.cfg");
    fs::write(
        &cfg20,
        fs::read_to_string(&cfg).unwrap().replace("n = 13", "n = 20"),
    )
    .unwrap();
    let over = run(&[
        "compile",
        cfg20.to_str().unwrap(),
        "--max-n",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!over.status.success());
}

#[test]
fn config_errors_name_the_field() {
    let dir = scratch_dir("badfield");
    let cfg_text = fs::read_to_string(config_path("suppress2to6.cfg"))
        .unwrap()
        .replace("gradient = 200 T/m", "gradient = 200 V");
    let cfg = dir.join("bad.cfg");
    fs::write(&cfg, cfg_text).unwrap();
    let o = run(&["compile", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("trap.gradient"), "stderr: {stderr}");
}

#[test]
fn constants_override_changes_derived_couplings() {
    let dir = scratch_dir("constants");
    let table = dir.join("constants.txt");
    // A heavier electron weakens every derived coupling.
    fs::write(&table, "electron_mass = 1.0e-30\n").unwrap();
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    let cfg = config_path("suppress2to6.cfg");
    let o = run(&[
        "compile",
        cfg.to_str().unwrap(),
        "--out",
        out_a.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = Command::new(bin())
        .args([
            "compile",
            cfg.to_str().unwrap(),
            "--out",
            out_b.to_str().unwrap(),
        ])
        .env("TRAPSPIN_CONSTANTS", &table)
        .output()
        .unwrap();
    assert!(o.status.success());
    let a = fs::read_to_string(out_a.join("schedule.txt")).unwrap();
    let b = fs::read_to_string(out_b.join("schedule.txt")).unwrap();
    let jz = |text: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix("JZ "))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(jz(&a) != jz(&b));
}
