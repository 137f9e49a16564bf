use nilamalgam_core::certificate::{recheck, separate_certificate, verify, Certificate, Kind};
use nilamalgam_core::workspace::Workspace;

const PAIRS: &str = r#"{
  "format_version": 1,
  "groups": {
    "H": { "gens": ["a", "b", "c"], "rels": ["[b,a] = c"] },
    "K": { "gens": ["p", "q", "r"], "rels": ["[q,p] = r"] }
  },
  "amalgams": {
    "HKc": { "factors": ["H", "K"], "identify": [["c", "r"]] },
    "HKa": { "factors": ["H", "K"], "identify": [["a", "p"]] },
    "HF":  { "factors": ["H", "K"], "identify": [["a^2", "p"], ["b", "q^2"], ["c", "r"]] }
  },
  "elements": { "w": { "in": "HKa", "word": "b*q^-1*a" } }
}"#;

fn round_trip(c: &Certificate, ws: &Workspace) {
    let back = Certificate::from_json(&c.to_json()).unwrap();
    recheck(&back, ws).unwrap();
    assert_eq!(back.to_json(), c.to_json());
}

#[test]
fn witnesses_recheck_from_json() {
    let ws = Workspace::from_json(PAIRS).unwrap();
    for (check, target) in [("central", "HKc"), ("cyclic", "HKa"), ("finite-index", "HF"), ("abelianization", "HKa")] {
        let c = verify(&ws, check, Some(target)).unwrap();
        assert!(c.verified, "{check}");
        assert_eq!(c.kind, Kind::Witness);
        round_trip(&c, &ws);
    }
    let h = Workspace::load("builtin:heisenberg").unwrap();
    for check in ["double", "polyrs", "central", "not-perfect", "theta"] {
        let c = verify(&h, check, None).unwrap();
        assert!(c.verified, "{check}");
        round_trip(&c, &h);
    }
}

#[test]
fn tampered_chain_is_rejected() {
    let ws = Workspace::from_json(PAIRS).unwrap();
    let c = verify(&ws, "cyclic", Some("HKa")).unwrap();
    let text = c.to_json().replacen("\"b\": \"", "\"b\": \"a*", 1);
    let bad = Certificate::from_json(&text).unwrap();
    assert!(recheck(&bad, &ws).is_err());
}

#[test]
fn counterexample_and_polyrs_reports() {
    let ws = Workspace::load("builtin:nil-neg").unwrap();
    let trap = verify(&ws, "counterexample", None).unwrap();
    assert!(trap.verified);
    assert_eq!(trap.kind, Kind::Trap);
    round_trip(&trap, &ws);

    let p = verify(&ws, "polyrs", None).unwrap();
    assert!(!p.verified);
    assert_eq!(p.report["compatibility"]["first_failure"], 1);
    round_trip(&p, &ws);

    let s = separate_certificate(&ws, "G", "a", 4, true).unwrap();
    assert!(!s.verified);
    assert_eq!(s.conclusion, "unknown");
    round_trip(&s, &ws);
}

#[test]
fn separate_is_deterministic() {
    let ws = Workspace::from_json(PAIRS).unwrap();
    let a = separate_certificate(&ws, "HKa", "w", 4, true).unwrap().to_json();
    let b = separate_certificate(&ws, "HKa", "w", 4, true).unwrap().to_json();
    assert_eq!(a, b);
    let c = Certificate::from_json(&a).unwrap();
    recheck(&c, &ws).unwrap();
}

#[test]
fn example_records_sign() {
    let ws = Workspace::load("builtin:example-8-1").unwrap();
    let c = verify(&ws, "abelian-factor", None).unwrap();
    assert!(c.verified);
    assert_eq!(c.report["squared_form"]["epsilon"], -1);
    round_trip(&c, &ws);
}
