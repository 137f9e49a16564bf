use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilamalgam")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn normal_forms() {
    let o = run(&["nf", &data("heis.json"), "H", "b*a"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "a^1*b^1*c^1"));
    let o = run(&["nf", &data("amal.json"), "G", "a^2*b^-3"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "1"));
    let o = run(&["nf", &data("amal.json"), "G", "a*b"]);
    assert_eq!(stdout(&o), "Za(a^1) * Zb(b^1)");
    let o = run(&["nf", &data("amal.json"), "G", "root", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["syllable_length"], 1);
    assert_eq!(v["normal_form"], "Za(a^1)");
}

#[test]
fn input_errors_exit_2() {
    let o = run(&["nf", &data("heis.json"), "Q", "a"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unresolved reference `Q`"));
    assert_eq!(code(&run(&["nf", &data("heis.json"), "H", "a*d"])), 2);
    assert_eq!(code(&run(&["abelianize", "no-such-file.json"])), 2);
    assert_eq!(code(&run(&["verify", "no-such-check", "builtin:nil-neg"])), 2);
    assert_eq!(code(&run(&["separate", &data("amal.json"), "G", "a*a^-1"])), 2);
    assert_eq!(code(&run(&["verify", "cyclic", "builtin:nil-neg"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn abelianizations() {
    assert_eq!(stdout(&run(&["abelianize", &data("heis.json")])), "Z^2");
    assert_eq!(stdout(&run(&["abelianize", &data("amal.json"), "G"])), "Z");
    let o = run(&["abelianize", "builtin:nil-neg", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["free_rank"], 2);
}

#[test]
fn verify_exit_codes() {
    assert_eq!(code(&run(&["verify", "not-perfect", &data("amal.json"), "G"])), 0);
    let o = run(&["verify", "counterexample", "builtin:nil-neg", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "trap");
    assert_eq!(v["convention"], "[u,v] = u^-1*v^-1*u*v; u^v = v^-1*u*v");
    let o = run(&["verify", "polyrs", "builtin:nil-neg", "--json"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["compatibility"]["first_failure"], 1);
    assert_eq!(code(&run(&["verify", "double", &data("heis_double.json"), "D"])), 0);
    assert_eq!(code(&run(&["verify", "polyrs", "builtin:heisenberg"])), 0);
}

#[test]
fn separation() {
    let o = run(&["separate", &data("amal.json"), "G", "a", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["strategy"], "abelianization");
    let o = run(&["separate", "builtin:nil-neg", "G", "a", "--max-derived-length", "4"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).ends_with("unknown"));
}

#[test]
fn deterministic_output_is_byte_identical() {
    let args = ["separate", &data("heis_double.json"), "HK", "b*q^-1*a", "--deterministic", "--json"];
    let first = run(&args);
    assert_eq!(code(&first), 0);
    for _ in 0..3 {
        assert_eq!(run(&args).stdout, first.stdout);
    }
}

#[test]
fn certificates_recheck() {
    let dir = std::env::temp_dir().join(format!("nilamalgam-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cases: [(&[&str], i32); 5] = [
        (&["verify", "counterexample", "builtin:nil-neg"], 0),
        (&["verify", "polyrs", "builtin:nil-neg"], 1),
        (&["verify", "polyrs", "builtin:heisenberg"], 0),
        (&["verify", "abelian-factor", "builtin:example-8-1"], 0),
        (&["separate", "builtin:nil-neg", "G", "a"], 1),
    ];
    for (k, (args, expected)) in cases.iter().enumerate() {
        let mut full = args.to_vec();
        full.extend(["--json", "--deterministic"]);
        let o = run(&full);
        assert_eq!(code(&o), *expected, "{args:?}");
        let path = dir.join(format!("cert{k}.json"));
        std::fs::write(&path, &o.stdout).unwrap();
        let r = run(&["recheck", path.to_str().unwrap()]);
        assert_eq!(code(&r), *expected, "recheck of {args:?}: {}", stdout(&r));
        assert!(stdout(&r).starts_with("recheck ok"));
    }

    // tamper with an image in the tower certificate
    let text = std::fs::read_to_string(dir.join("cert2.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    let hom = v["chain"][0]["hom"].as_object_mut().unwrap();
    let key = hom.keys().next().unwrap().clone();
    hom.insert(key, Value::String("1".into()));
    let bad = dir.join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let r = run(&["recheck", bad.to_str().unwrap()]);
    assert_eq!(code(&r), 1);
    assert!(stdout(&r).starts_with("certificate rejected"));

    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&run(&["recheck", bad.to_str().unwrap()])), 2);
    std::fs::remove_dir_all(&dir).ok();
}
