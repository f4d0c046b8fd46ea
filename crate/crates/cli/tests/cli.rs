use std::path::PathBuf;
use std::process::{Command, Output};

fn liftlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liftlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn script(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("liftlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn syntax_errors_exit_two_with_location() {
    let path = script("bad.lift", "chart M(q p)\n");
    let out = liftlab(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.lift:1:11: unexpected `p` (expected `,`, `|`, `)`)"), "{err}");
}

#[test]
fn missing_file_exits_two() {
    let out = liftlab(&["run", "/nonexistent/script.lift"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_runs_definitions_only() {
    let path = script(
        "defs.lift",
        "chart M(x, y, z)\nbivector L on M = x * d/dy ^ d/dz\nbivector B on M = d/dx ^ d/dy + y * d/dy ^ d/dz\ncheck poisson B\n",
    );
    let p = path.to_str().unwrap();
    let ok = liftlab(&["check", "poisson", "--input", p, "--define", "L"]);
    assert_eq!(ok.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert!(stdout.starts_with("check poisson L\n"), "{stdout}");
    assert!(!stdout.contains("check poisson B"));
    let bad = liftlab(&["check", "poisson", "--input", p, "--define", "B"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn json_format() {
    let path = script("json.lift", "chart M(x, y)\nbivector L on M = d/dx ^ d/dy\ncheck poisson L\n");
    let out = liftlab(&["run", path.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["outputs"][0]["command"], "check poisson L");
}

#[test]
fn battery_is_seeded() {
    let a = liftlab(&["battery", "--count", "4", "--seed", "9"]);
    let b = liftlab(&["--seed", "9", "battery", "--count", "4"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).contains("4 pairs"));
}
