use std::process::{Command, Output};

use heartwood::cli::CliError;
use heartwood_core::Error;
use serde_json::Value;

fn hw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heartwood")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = hw(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let v: Value = serde_json::from_str(&ok(&a)).unwrap();
    assert_eq!(v["schema"], "heartwood/1");
    v
}

fn code(args: &[&str]) -> i32 {
    hw(args).status.code().unwrap()
}

#[test]
fn gen_iet_reproduces_gold() {
    let dir = tempdir();
    let path = dir.join("gold.json");
    let p = path.to_str().unwrap();
    ok(&["gen", "iet", "--scalar", "quad:5", "--lengths", "3/2:-1/2,-1/2:1/2", "--perm", "2,1", "-o", p]);
    assert_eq!(json(&["validate", p]), json(&["validate", "SYS-GOLD"]));
    let v = json(&["validate", p]);
    assert_eq!(v["regime"], "surface");
    let sys = heartwood::parse_system(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(sys, heartwood_core::catalog::sys_gold());
}

#[test]
fn gen_itm_and_regime() {
    let out = ok(&["gen", "itm", "--length", "2", "--piece", "a,0,1,1"]);
    let sys = heartwood::parse_system(&out).unwrap();
    assert_eq!(sys, heartwood_core::catalog::sys_shift());
    assert_eq!(json(&["validate", "SYS-SHIFT"])["regime"], "thin");
    assert_eq!(code(&["gen", "itm", "--length", "2", "--piece", "a,0,1,3"]), 2);
    assert_eq!(code(&["gen", "itm", "--length", "2"]), 2);
    assert_eq!(code(&["gen", "iet", "--lengths", "1/2,1/2", "--perm", "2,1", "--total", "2"]), 2);
}

#[test]
fn word_commands() {
    assert_eq!(ok(&["dom", "SYS-SHIFT", "a.a.a"]).lines().next(), Some("dom(a.a.a) = ∅"));
    let v = json(&["dom", "SYS-SHIFT", "a"]);
    assert_eq!(v["admissible"], true);
    assert_eq!(v["diameter"], "1/1");
    let v = json(&["translen", "SYS-POINT", "a"]);
    assert_eq!((v["length"].as_str(), v["kind"].as_str()), (Some("1/1"), Some("hyperbolic")));
    let v = json(&["translen", "SYS-REFLECT", "a"]);
    assert_eq!(v["kind"], "elliptic");
    assert_eq!(code(&["dom", "SYS-SHIFT", "a.z"]), 2);
}

#[test]
fn word_sets_are_sorted_lines() {
    let out = ok(&["laminary", "SYS-GOLD", "2", "3"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[..4], ["a", "A", "b", "B"]);
    assert!(lines.iter().all(|l| l.len() <= 3));
    let v = json(&["laminary", "SYS-GOLD", "2", "3"]);
    assert_eq!(v["words"].as_array().unwrap().len(), lines.len());
    assert_eq!(v["flags"]["finite_depth"], true);
    let counts = ok(&["adm-count", "SYS-GOLD", "5", "--positive"]);
    let c: Vec<&str> = counts.lines().map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(c, ["2", "3", "4", "5", "6"]);
    let v = json(&["adm-count", "SYS-SHIFT", "3"]);
    assert_eq!(v["counts"], serde_json::json!([1, 2, 2, 0]));
}

#[test]
fn dual_member_and_leaves() {
    let v = json(&["dual-member", "SYS-GOLD", "a.b", "--eps", "1/4", "--search-len", "13"]);
    assert_eq!(v["answer"], "YES");
    let v = json(&["dual-member", "SYS-SHIFT", "a", "--eps", "1/2", "--search-len", "4"]);
    assert_eq!(v["answer"], "NO_WITNESS");
    let v = json(&["leaves", "SYS-GOLD", "4", "--diagonals", "6"]);
    assert!(!v["leaves"].as_array().unwrap().is_empty());
    assert_eq!(v["diagonals"]["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn ball_output_and_budget() {
    let dot = ok(&["ball", "SYS-SHIFT", "--radius", "1", "--format", "dot"]);
    assert!(dot.starts_with("graph ball {"));
    let v: Value = serde_json::from_str(&ok(&["ball", "SYS-GOLD", "--word", "a.b"])).unwrap();
    assert_eq!(v["copies"].as_object().unwrap().len(), 3);
    assert_eq!(code(&["ball", "SYS-GOLD", "--radius", "3", "--budget", "10"]), 3);
    assert_eq!(code(&["ball", "SYS-GOLD"]), 2);
}

#[test]
fn heart_commands() {
    let v = json(&["qk", "SYS-POINT", "--periodic", "a", "--depth", "6"]);
    assert_eq!(v["status"], "RAY");
    assert_eq!(v["nested"], true);
    let v = json(&["qk", "SYS-GOLD", "--fib", "--depth", "8"]);
    assert_eq!(v["status"], "ADMISSIBLE");
    let v = json(&["qk", "SYS-GOLD", "--fib", "--prefix", "a.a", "--depth", "8"]);
    assert_eq!(v["status"], "EVENTUALLY_ADMISSIBLE");
    let v = json(&["heart", "SYS-GOLD", "6"]);
    assert_eq!(v["empty"], false);
    let v = json(&["limit-set", "SYS-SHIFT", "3"]);
    assert_eq!(v["pieces"].as_array().unwrap().len(), 0);
    let v = json(&["audit", "SYS-GOLD"]);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
    let v = json(&["audit", "SYS-GOLD", "--scalar", "quad:5", "--interval", "0,7/2:-3/2", "--n", "6"]);
    assert_eq!(v["cond3"]["status"], "fails");
    assert_eq!(v["cond2"]["status"], "n/a");
    assert_eq!(code(&["audit", "SYS-GOLD", "--interval", "0,3"]), 2);
    let v = json(&["geom-probe", "SYS-GOLD", "5"]);
    assert_eq!(v["stabilizes"], true);
    let v = json(&["indep-probe", "SYS-ID", "3"]);
    assert_eq!(v["verdict"], "FAILS");
}

#[test]
fn approx_tables() {
    let args = ["approx", "SYS-GOLD", "--orbit", "2,3,5", "--words", "a.b,b.a,b.b", "--word-len", "3"];
    let csv = ok(&[&args[..], &["--format", "csv"]].concat());
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("word,stage1,stage2,stage3,host"));
    assert_eq!(lines.count(), 3);
    let v = json(&args);
    for row in v["rows"].as_array().unwrap() {
        assert_eq!(row["monotone"], true);
    }
    assert_eq!(v["convergence"]["non_increasing"], true);
    let v = json(&["approx", "SYS-SHIFT", "--stage", "0,11/10", "--stage", "0,6/5", "--words", "a"]);
    assert_eq!(v["rows"][0]["stages"], serde_json::json!(["1/1", "1/1"]));
    assert_eq!(code(&["approx", "SYS-SHIFT", "--stage", "0,6/5", "--stage", "0,11/10"]), 2);
    assert_eq!(code(&["approx", "SYS-GOLD", "--orbit", "3", "--words", "a.b", "--budget", "2"]), 0);
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(code(&["validate", "/nonexistent/system.json"]), 2);
    assert_eq!(code(&["validate", "SYS-GOLD", "--scalar", "quad:4"]), 2);
    assert_eq!(code(&["validate", "SYS-GOLD", "--scalar", "quad:3"]), 2);
    assert_eq!(code(&["nonsense"]), 2);
    let dir = tempdir();
    let p = dir.join("bad.json");
    std::fs::write(&p, "{\"tree\": 3}").unwrap();
    let o = hw(&["validate", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("$.tree"));
}

#[test]
fn exit_codes_by_error_kind() {
    assert_eq!(CliError::from(Error::input("x")).exit_code(), 2);
    assert_eq!(CliError::from(Error::resource("copies", 9, 1)).exit_code(), 3);
    assert_eq!(CliError::from(Error::invariant("x")).exit_code(), 4);
}

fn tempdir() -> std::path::PathBuf {
    use std::sync::atomic::{AtomicUsize, Ordering};
    static N: AtomicUsize = AtomicUsize::new(0);
    let d = std::env::temp_dir().join(format!("heartwood-cli-{}-{}", std::process::id(), N.fetch_add(1, Ordering::Relaxed)));
    std::fs::create_dir_all(&d).unwrap();
    d
}
