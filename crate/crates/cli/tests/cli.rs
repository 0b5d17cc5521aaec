use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn janus(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_janus"))
        .args(args)
        .current_dir(cwd)
        .env_remove("JANUS_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn field(out: &str, key: &str) -> f64 {
    let line = out.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("no {key} in {out}"));
    line[key.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn g2_single_state_and_sweet_spot_neighbourhood() {
    let dir = tempfile::tempdir().unwrap();
    let o = janus(&["g2", "--r", "1", "--eta", "0"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let g = field(&stdout(&o), "g2 analytic");
    assert!((g - (3.0 + 1.0 / 1f64.sinh().powi(2))).abs() < 1e-12);
    assert!((field(&stdout(&o), "g2 oracle") - g).abs() < 1e-8);

    let o = janus(&["g2", "--r", "0.34", "--Delta", "pi", "--delta", "pi", "--eta", "2.2007"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!((field(&out, "g2 analytic") - field(&out, "g2 oracle")).abs() < 1e-8);
}

#[test]
fn g2_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let vacuum = janus(&["g2", "--r", "0", "--eta", "0"], dir.path());
    assert_eq!(vacuum.status.code(), Some(3));
    assert!(stderr(&vacuum).contains("vacuum"));

    let infeasible = janus(&["g2", "--r", "0.3", "--Delta", "pi", "--delta", "pi", "--eta", "50"], dir.path());
    assert_eq!(infeasible.status.code(), Some(2));

    let negative = janus(&["g2", "--r", "-1", "--eta", "0"], dir.path());
    assert_eq!(negative.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = janus(&["g2", "--r", "1", "--bogus", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--bogus"));
    assert!(!janus(&["frobnicate"], dir.path()).status.success());
}

#[test]
fn help_lists_subcommands_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let top = stdout(&janus(&["--help"], dir.path()));
    for word in ["g2", "verify", "scan", "optimize", "--config", "--out-dir", "--tol-norm", "--tol-oracle", "--tail"] {
        assert!(top.contains(word), "missing {word}");
    }
    let scan = stdout(&janus(&["scan", "--help"], dir.path()));
    for word in ["--fig", "--axis", "--fix", "--equal", "--formula", "--out", "--format"] {
        assert!(scan.contains(word), "missing {word}");
    }
}

#[test]
fn verify_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "--suite", "g2", "--samples", "30", "--seed", "5"];
    let a = janus(&args, dir.path());
    let b = janus(&args, dir.path());
    assert!(a.status.success(), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("all checks passed"));

    let other = janus(&["verify", "--suite", "g2", "--samples", "30", "--seed", "6"], dir.path());
    assert_ne!(other.stdout, a.stdout);
}

#[test]
fn verify_reports_failing_checks() {
    let dir = tempfile::tempdir().unwrap();
    let o = janus(&["verify", "--suite", "oddcat", "--samples", "10"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("oddcat g2 vs boundary curve"));
    assert!(out.lines().any(|l| l.starts_with("oddcat g2 vs boundary polynomial") && l.ends_with("FAIL")));

    assert_eq!(janus(&["verify", "--suite", "nope"], dir.path()).status.code(), Some(2));
    assert_eq!(janus(&["verify", "--samples", "0"], dir.path()).status.code(), Some(2));
}

#[test]
fn scan_presets_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = janus(&["scan", "--fig", "1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "r,g2,reason");
    assert_eq!(rows.len(), 257);

    let out = dir.path().join("sub/fig3a.json");
    let o = janus(&["scan", "--fig", "3a", "--out", out.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let json: String = fs::read_to_string(&out).unwrap();
    assert!(json.trim_start().starts_with('{'));

    assert_eq!(janus(&["scan", "--fig", "9z"], dir.path()).status.code(), Some(2));
}

#[test]
fn scan_custom_axes() {
    let dir = tempfile::tempdir().unwrap();
    let o = janus(
        &[
            "scan", "--axis", "r:0.1:1:5", "--axis", "eta:0:3:4", "--fix", "Delta=pi", "--fix", "delta=pi",
            "--equal", "--formula", "optimal", "--out", "custom.csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("custom.csv")).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "r,eta,g2,reason");
    assert_eq!(rows.len(), 1 + 20);
    assert!(text.contains("# formula = optimal"));

    let mismatch = janus(&["scan", "--axis", "r:0.1:1:5", "--formula", "optimal", "--out", "x.csv"], dir.path());
    assert_eq!(mismatch.status.code(), Some(2));
    let bad_axis = janus(&["scan", "--axis", "q:0:1:5"], dir.path());
    assert_eq!(bad_axis.status.code(), Some(2));
}

#[test]
fn optimize_modes() {
    let dir = tempfile::tempdir().unwrap();
    let o = janus(&["optimize", "--mode", "table-s1"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("rows within 5e-5"));

    let o = janus(&["optimize", "--mode", "boundary", "--out", "b.json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let json = fs::read_to_string(dir.path().join("b.json")).unwrap();
    assert_eq!(json.matches("\"boundary\"").count(), 601);

    let o = janus(&["optimize", "--mode", "sweet-spot", "--out", "s.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn output_directory_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_janus"));
        c.current_dir(dir.path()).env_remove("JANUS_OUT_DIR");
        if let Some(e) = env {
            c.env("JANUS_OUT_DIR", e);
        }
        let o = c.args(extra).args(["scan", "--fig", "1"]).output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
    };
    fs::write(dir.path().join("janus.conf"), "out_dir = from_config\nformat = json\n").unwrap();

    run(Some("from_env"), &[]);
    assert!(dir.path().join("from_env/fig1.csv").exists());
    run(Some("from_env"), &["--config", "janus.conf"]);
    assert!(dir.path().join("from_config/fig1.json").exists());
    run(Some("from_env"), &["--config", "janus.conf", "--out-dir", "from_flag"]);
    assert!(dir.path().join("from_flag/fig1.json").exists());
}

#[test]
fn config_errors() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.conf"), "tail = 1e-12\ncutoff = 7\n").unwrap();
    let o = janus(&["--config", "bad.conf", "g2", "--r", "1", "--eta", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.conf:2"));
    let o = janus(&["--config", "missing.conf", "g2", "--r", "1", "--eta", "0"], dir.path());
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn fixed_cutoff_from_config_is_used() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.conf"), "cutoff = 128\n").unwrap();
    let o = janus(&["--config", "c.conf", "g2", "--r", "0.2", "--eta", "0"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("cutoff         128"));
    fs::write(dir.path().join("c.conf"), "cutoff = 8\n").unwrap();
    let o = janus(&["--config", "c.conf", "g2", "--r", "1.0", "--eta", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
