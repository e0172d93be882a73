use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eulercx"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn in_process(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["eulercx"];
    full.extend_from_slice(args);
    let code = eulercx::cli::run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

fn tmp(tag: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("eulercx-cli-{}-{}", tag, std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn golden_cyclo_dims() {
    let (code, out) = in_process(&["cyclo", "--level", "11", "--report", "dims", "--no-cache"]);
    assert_eq!(code, 0);
    assert_eq!(out, include_str!("golden/cyclo_level11_dims.json"));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "eulercx/1");
    assert_eq!(v["result"]["dims"]["h1_cusp"], 1);
    assert_eq!(v["result"]["dims"]["coker"], 1);
}

#[test]
fn golden_bianchi_csv() {
    let (code, out) = in_process(&["bianchi", "--field", "eisenstein", "--verify", "dims", "--format", "csv", "--no-cache"]);
    assert_eq!(code, 0);
    assert_eq!(out, include_str!("golden/bianchi_eisenstein_dims.csv"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bianchi", "--field", "gaussian", "--prime-norm", "5", "--verify", "mtheor2da", "--no-cache"]).0, 0);
    assert_eq!(run(&["bloch", "--check", "five-term", "--trials", "100", "--tol", "1e-9", "--no-cache"]).0, 0);
    assert_eq!(run(&["hmap", "--check", "degeneration", "--no-cache"]).0, 1);
    assert_eq!(run(&["bianchi", "--field", "eisenstein", "--verify", "dims", "--mode", "paper-literal", "--no-cache"]).0, 1);
    for bad in [
        &["frobnicate"][..],
        &["cyclo", "--level", "2", "--no-cache"],
        &["bloch", "--tol", "-1", "--no-cache"],
        &["bloch", "--format", "csv", "--no-cache"],
        &["bianchi", "--field", "cubic"],
        &["bianchi", "--prime-norm", "6", "--no-cache"],
        &["cyclo", "--report", "iso", "--level", "12", "--no-cache"],
    ] {
        let (code, _, err) = run(bad);
        assert_eq!(code, 2, "{:?}: {}", bad, err);
    }
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn inconclusive_exits_zero_with_warning() {
    let (code, out, err) = run(&["bianchi", "--ideal", "1+3i", "--no-cache"]);
    assert_eq!(code, 0);
    assert!(err.contains("warning"), "{}", err);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "inconclusive");
    let (code, out, _) = run(&["units", "--level", "5", "--check", "distribution", "--prec", "0", "--no-cache"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"status\": \"inconclusive\""));
}

#[test]
fn experimental_never_changes_the_exit_code() {
    let base = run(&["bianchi", "--field", "gaussian", "--ideal", "3", "--no-cache"]);
    let exp = run(&["bianchi", "--field", "gaussian", "--ideal", "3", "--no-cache", "--experimental"]);
    assert_eq!(base.0, 0);
    assert_eq!(exp.0, base.0);
    let v: serde_json::Value = serde_json::from_str(&exp.1).unwrap();
    assert!(v["experimental"]["conjecture"].is_array());
    assert_eq!(v["status"], "pass");
}

#[test]
fn byte_identical_and_cached() {
    let dir = tmp("cache");
    let d = dir.to_str().unwrap();
    let args = ["bloch", "--check", "identities", "--level", "5", "--cache-dir", d];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    let (_, c, _) = run(&["bloch", "--check", "identities", "--level", "5", "--no-cache"]);
    assert_eq!(a, c);
    let (_, _, _) = run(&["bloch", "--check", "identities", "--level", "5", "--seed", "1", "--cache-dir", d]);
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 2);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn no_cache_writes_nothing() {
    let dir = tmp("none");
    let (code, _, _) = run(&["cyclo", "--level", "5", "--no-cache", "--cache-dir", dir.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(!dir.exists());
}

#[test]
fn out_file_and_text() {
    let dir = tmp("out");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("r.txt");
    let (code, stdout, _) = run(&["cyclo", "--level", "7", "--format", "text", "--no-cache", "--out", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let t = std::fs::read_to_string(&p).unwrap();
    assert!(t.starts_with("eulercx cyclo: pass"), "{}", t);
    let _ = std::fs::remove_dir_all(&dir);
}
