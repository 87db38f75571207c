use std::path::Path;
use std::process::{Command, Output};

fn mhng(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mhng"));
    cmd.args(args).env_remove("MHNG_OUT_DIR");
    if let Some(dir) = out_env {
        cmd.env("MHNG_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn dump_defaults_is_a_valid_config() {
    let out = mhng(&["dump-defaults"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("num_symbols = 15"));
    assert!(text.contains("total_steps = 10000"));

    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &text);
    let check = mhng(&["validate-config", "--config", &path], None);
    assert!(check.status.success());
}

#[test]
fn missing_config_fails() {
    let out = mhng(&["run", "--config", "/nonexistent/run.toml"], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonexistent"));
}

#[test]
fn invalid_config_exits_with_config_status() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "num_symbols = 0\n");
    let out = mhng(&["validate-config", "--config", &path], None);
    assert_eq!(out.status.code(), Some(2));

    let path = write_config(dir.path(), "no_such_key = 1\n");
    let out = mhng(&["validate-config", "--config", &path], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_artifacts_and_flag_beats_env() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "total_steps = 20\nsnapshot_interval = 10\n");
    let flag_dir = dir.path().join("flag");
    let env_dir = dir.path().join("env");

    let out = mhng(
        &["run", "--config", &path, "--seed", "4", "--out", flag_dir.to_str().unwrap()],
        Some(&env_dir),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(flag_dir.join("exchanges.csv").is_file());
    assert!(flag_dir.join("metadata.json").is_file());
    assert!(flag_dir.join("snapshots/step_000020_agent_A.json").is_file());
    assert!(!env_dir.exists());

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(flag_dir.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 4);

    let out = mhng(&["run", "--config", &path], Some(&env_dir));
    assert!(out.status.success());
    assert!(env_dir.join("exchanges.csv").is_file());
}

#[test]
fn sweep_creates_one_directory_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "total_steps = 10\nsnapshot_interval = 10\n");
    let root = dir.path().join("sweep");
    let out = mhng(
        &["sweep", "--seeds", "0..9", "--config", &path, "--out", root.to_str().unwrap()],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut names: Vec<String> = std::fs::read_dir(&root)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let expected: Vec<String> = (0..10).map(|s| format!("seed_{s:04}")).collect();
    assert_eq!(names, expected);
}

#[test]
fn bad_seed_range_is_rejected() {
    let out = mhng(&["sweep", "--seeds", "9..3"], None);
    assert!(!out.status.success());
}
