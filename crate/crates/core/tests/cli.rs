use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_whittaker-bench"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("wb-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn stdout(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn group_info_reports_orders() {
    let s = stdout(&["group-info", "--n", "2", "--p", "2"]);
    assert!(s.contains("GL_n(E)") && s.contains("180"));
    assert!(s.contains("agree: true"));
}

#[test]
fn bessel_over_f2() {
    let s = stdout(&["bessel", "--n", "2", "--p", "2"]);
    let rows: Vec<&str> = s.lines().skip(1).collect();
    assert_eq!(rows, ["1,1,[2],(1),1", "1,1,[1, 1],(1 1),-1", "2,2,[2],(1),1", "2,2,[1, 1],(1 1),1/2"]);
}

#[test]
fn verify_writes_csv_and_summary() {
    let out = tmpdir("verify");
    let cache = tmpdir("verify-cache");
    let args = ["verify", "--n", "2", "--p", "2", "--suite", "main,reg", "--out", out.to_str().unwrap(), "--cache-dir", cache.to_str().unwrap()];
    stdout(&args);
    let csv = std::fs::read_to_string(out.join("verify-n2-p2-k1.csv")).unwrap();
    assert!(csv.starts_with("suite,anchor,params,lhs,rhs,pass,micros"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("verify-n2-p2-k1.json")).unwrap()).unwrap();
    assert_eq!(json["failed"], 0);
    assert!(std::fs::read_dir(&cache).unwrap().count() > 0);
    let rep = stdout(&["report", "--input", out.join("verify-n2-p2-k1.csv").to_str().unwrap()]);
    assert!(rep.contains("degree-weighted-period-sum"));
    std::fs::remove_dir_all(out).unwrap();
    std::fs::remove_dir_all(cache).unwrap();
}

#[test]
fn bad_input_exits_with_error() {
    let st = bin().args(["group-info", "--p", "4"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = bin().args(["verify", "--suite", "nonsense"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}
