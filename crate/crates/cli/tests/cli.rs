use std::fs;
use std::process::{Command, Output};

fn optosync(args: &[&str], cwd: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optosync"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn print_defaults_is_a_valid_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = optosync(&["--print-defaults"], dir.path());
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for key in [
        "chi_c = 0.4",
        "t_end = 2000.0",
        "dt = 0.001",
        "decimate = 100",
        "window_fraction = 0.5",
    ] {
        assert!(text.contains(key), "{key}");
    }
    fs::write(
        dir.path().join("d.toml"),
        format!("{text}\nt_end = 1.0\n").replace("t_end = 2000.0\n", ""),
    )
    .unwrap();
    let o = optosync(&["run", "d.toml", "--out", "o"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn run_preset_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("short.toml"), "t_end = 30.0\ndt = 0.01\n").unwrap();
    let o = optosync(
        &["run", "short.toml", "--preset", "fig2a", "--out", "fig2a"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("locked="));
    let manifest = dir.path().join("fig2a/manifest.json");
    assert!(manifest.is_file());
    let o = optosync(&["plot", manifest.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("fig2a/phase_space.gp").is_file());
}

#[test]
fn unknown_key_fails_with_name() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "chii_c = 0.1\n").unwrap();
    let o = optosync(&["run", "bad.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("chii_c"));
}

#[test]
fn unknown_preset_and_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = optosync(&["run", "--preset", "fig99"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fig99"));
    let o = optosync(&["run", "nope.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.toml"));
}

#[test]
fn divergence_exits_nonzero_and_keeps_output() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("d.toml"), "dt = 3.0\n").unwrap();
    let o = optosync(&["run", "d.toml", "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("diverged"));
    assert!(dir.path().join("o/classical.csv").is_file());
    assert!(dir.path().join("o/manifest.json").is_file());
}

#[test]
fn sweep_with_workers() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("s.toml"),
        "t_end = 5.0\ndt = 0.01\nsweep_values = [0.0, 0.6]\n",
    )
    .unwrap();
    let o = optosync(
        &[
            "sweep",
            "s.toml",
            "--preset",
            "fig8sweep",
            "--workers",
            "2",
            "--out",
            "sw",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(dir.path().join("sw/sweep_summary.csv")).unwrap();
    assert!(summary.starts_with("chi_c,mean_S_c"));
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn mismatched_subcommand_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = optosync(&["run", "--preset", "fig8sweep"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sweep"));
    let o = optosync(&["sweep", "--preset", "fig2a"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
