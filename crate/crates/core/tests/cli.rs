use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_corner-lens"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn run(cmd: &str, cfg: &Path, out: &Path, extra: &[&str]) -> i32 {
    let st = bin()
        .arg(cmd)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs");
    st.status.code().expect("exit code")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn spectrum_writes_csv_with_sidecars() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(
        run("spectrum", &config("sector_mode.json"), out.path(), &[]),
        0
    );
    let eigen = fs::read_to_string(out.path().join("eigen.csv")).unwrap();
    assert!(eigen.starts_with("k,mu,error"));
    let meta = json(&out.path().join("eigen.csv.meta.json"));
    assert_eq!(meta["command"], "spectrum");
    assert_eq!(meta["config_hash"].as_str().unwrap().len(), 64);
    assert!(meta["versions"].is_object());
    assert!(meta["tolerances"].is_object());
    let leftovers: Vec<_> = fs::read_dir(out.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn frequency_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config("power_bump.json");
    assert_eq!(
        run("frequency", &cfg, a.path(), &["--seed", "3", "--jobs", "2"]),
        0
    );
    assert_eq!(run("frequency", &cfg, b.path(), &["--seed", "3"]), 0);
    let ta = fs::read(a.path().join("trace.csv")).unwrap();
    assert_eq!(ta, fs::read(b.path().join("trace.csv")).unwrap());
    assert_eq!(json(&a.path().join("trace.csv.meta.json"))["seed"], 3);
}

#[test]
fn toml_config_is_accepted() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(
        run("spectrum", &config("hemisphere.toml"), out.path(), &[]),
        0
    );
    assert!(out.path().join("spectrum.json").exists());
}

#[test]
fn profile_and_counterexample_succeed() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(run("profile", &config("mixture.json"), out.path(), &[]), 0);
    assert!(out.path().join("beta.csv").exists());
    let out = tempfile::tempdir().unwrap();
    assert_eq!(
        run(
            "counterexample",
            &config("log_corner.json"),
            out.path(),
            &[]
        ),
        0
    );
    assert!(out.path().join("defect.csv").exists());
}

#[test]
fn verify_exit_codes() {
    let out = tempfile::tempdir().unwrap();
    assert_eq!(
        run("verify", &config("verify_fault.json"), out.path(), &[]),
        1
    );
    let table = fs::read_to_string(out.path().join("verify.csv")).unwrap();
    let failing: Vec<&str> = table.lines().filter(|l| l.contains(",false,")).collect();
    assert_eq!(failing.len(), 1, "{table}");
    assert!(failing[0].contains("Height"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"profile": {"dim": 2, "g": [1, 1], "radius": 1}, "typo": 1}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    assert_eq!(run("spectrum", &bad, &out, &[]), 2);
    let err = json(&out.join("error.json"));
    assert!(err.is_object());
    assert_eq!(
        run("spectrum", &dir.path().join("missing.json"), &out, &[]),
        2
    );
}

#[test]
fn numerical_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.json");
    fs::write(
        &cfg,
        r#"{"profile": {"dim": 2, "g": [1, 1], "radius": 1},
            "radii": {"r_min": 1e-3, "r_max": 1e-2, "per_decade": 1}}"#,
    )
    .unwrap();
    assert_eq!(run("frequency", &cfg, &dir.path().join("out"), &[]), 3);
}

#[test]
fn unknown_command_is_rejected() {
    let out = tempfile::tempdir().unwrap();
    let code = run("plot", &config("sector_mode.json"), out.path(), &[]);
    assert_ne!(code, 0);
}
