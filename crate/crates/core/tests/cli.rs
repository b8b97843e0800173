use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mcf-lab"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn check_suites_pass() {
    let o = run(&["check", "formulas", "--quiet"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let o = run(&["check", "operators"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("quadratic_exactness_2d"));
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(code(&run(&["check", "nonsense"])), 2);
    assert_eq!(code(&run(&["run", "/definitely/not/here.toml"])), 2);
    let o = run(&["run", fixture("unknown_key.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("time_step"));
    assert_eq!(code(&run(&["run", fixture("small_bump.toml").to_str().unwrap(), "--h", "-1"])), 2);
}

#[test]
fn wrong_sign_control_fails_checks() {
    let o = run(&["run", fixture("control_wrong_sign.toml").to_str().unwrap()]);
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 1, "{out}");
    assert!(out.contains("total_curvature_monotone     fail"), "{out}");
}

#[test]
fn blow_up_exits_3() {
    let o = run(&["run", fixture("control_blowup.toml").to_str().unwrap(), "--quiet"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn run_writes_outputs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = fixture("small_bump.toml");
    for out in [&a, &b] {
        let o = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--quiet"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["timeseries.csv", "final_profile.tbl", "summary.txt", "config.toml"] {
        assert!(a.join(f).exists(), "{f} missing");
    }
    let csv = std::fs::read(a.join("timeseries.csv")).unwrap();
    assert_eq!(csv, std::fs::read(b.join("timeseries.csv")).unwrap());
    assert!(String::from_utf8_lossy(&csv)
        .starts_with("t,sup_dist,I_total,sup_kappa,phi,c0_fit,c1_fit,fit_residual,harnack_min,convexity_margin,squeeze_violation\n"));

    let o = run(&["fit", a.join("final_profile.tbl").to_str().unwrap(), "grim-reaper"]);
    assert_eq!(code(&o), 0);
    let line = String::from_utf8_lossy(&o.stdout);
    assert!(line.starts_with("t=0.5 c0="), "{line}");
}

#[test]
fn sweep_reports_each_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let cases = dir.path().join("cases");
    std::fs::create_dir(&cases).unwrap();
    std::fs::copy(fixture("small_bump.toml"), cases.join("a.toml")).unwrap();
    std::fs::copy(fixture("control_wrong_sign.toml"), cases.join("b.toml")).unwrap();
    let out = dir.path().join("out");
    let o = run(&["sweep", cases.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let table = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 1, "{table}");
    assert!(table.contains("small_bump,pass,"), "{table}");
    assert!(table.contains("control_wrong_sign,fail,"), "{table}");
    assert!(out.join("small_bump/summary.txt").exists());

    std::fs::copy(fixture("unknown_key.toml"), cases.join("c.toml")).unwrap();
    assert_eq!(code(&run(&["sweep", cases.to_str().unwrap(), "--quiet"])), 2);
}

#[test]
fn profile_subcommands_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["profile", "tilted", "2.0", "--out", d, "--h", "0.1", "--quiet"]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(dir.path().join("tilted.tbl")).unwrap();
    assert!(text.starts_with("# kind=tilted_grim_reaper_plane"));
    let o = run(&["profile", "bowl", "--r-max", "10", "--h", "0.0025", "--out", d, "--quiet"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("bowl_n2.tbl").exists());
    assert_eq!(code(&run(&["profile", "extract-wing", "1.0"])), 2);
}
