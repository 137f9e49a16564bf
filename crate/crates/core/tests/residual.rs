use std::sync::Arc;

use nilamalgam_core::amalgam::Amalgam;
use nilamalgam_core::residual::{
    abelian_factor_witness, central_witness, cyclic_witness, double_witness, finite_index_witness,
    polyrs_compatibility, polyrs_tower, separate, Orientation, SeparateOutcome, Strategy,
};
use nilamalgam_core::workspace::Workspace;

const PAIRS: &str = r#"{
  "format_version": 1,
  "groups": {
    "H": { "gens": ["a", "b", "c"], "rels": ["[b,a] = c"] },
    "K": { "gens": ["p", "q", "r"], "rels": ["[q,p] = r"] },
    "Za": "group Za { gens: e; rels: }",
    "Zb": "group Zb { gens: f; rels: }",
    "Z": "group Z { gens: t; rels: }"
  },
  "amalgams": {
    "HKc": { "factors": ["H", "K"], "identify": [["c", "r"]] },
    "HKa": { "factors": ["H", "K"], "identify": [["a", "p"]] },
    "HF":  { "factors": ["H", "K"], "identify": [["a^2", "p"], ["b", "q^2"], ["c", "r"]] },
    "ZZ":  { "factors": ["Za", "Zb"], "core": "Z", "embeddings": [["e^2"], ["f^3"]] }
  }
}"#;

fn pairs(name: &str) -> Arc<Amalgam> {
    Workspace::from_json(PAIRS).unwrap().amalgam(name).unwrap()
}

#[test]
fn nil_neg_trap_holds_and_nothing_separates() {
    let ws = Workspace::load("builtin:nil-neg").unwrap();
    let g = ws.amalgam("G").unwrap();
    let trap = ws.check_trap(ws.trap("G").unwrap()).unwrap();
    assert_eq!(trap.orientation, Orientation::AsStated);
    assert!(trap.verified());

    let compat = polyrs_compatibility(&g).unwrap();
    assert!(!compat.compatible);
    assert_eq!(compat.first_failure, Some(1));

    let a = g.parse_word("a").unwrap();
    match separate(&g, &a, 4, true).unwrap() {
        SeparateOutcome::Unknown { attempts } => assert_eq!(attempts.len(), Strategy::ORDER.len()),
        SeparateOutcome::Separated { witness, .. } => panic!("separated by {}", witness.strategy),
    }
    // x survives in the abelianization
    let x = g.parse_word("x").unwrap();
    assert!(matches!(separate(&g, &x, 4, true).unwrap(), SeparateOutcome::Separated { .. }));
}

#[test]
fn trap_identity_fails_elsewhere() {
    let ws = Workspace::load("builtin:nil-neg").unwrap();
    let g = ws.amalgam("G").unwrap();
    let p = |t: &str| g.parse_word(t).unwrap();
    let err = nilamalgam_core::residual::trap_certificate(&g, &p("x"), &p("a"), &p("1"), &p("y"));
    assert!(err.is_err());
}

#[test]
fn example_split_has_index_two() {
    let ws = Workspace::load("builtin:example-8-1").unwrap();
    let g = ws.amalgam("G").unwrap();
    let w = abelian_factor_witness(&g).unwrap();
    w.verify().unwrap();
    assert_eq!(w.report["split"]["index"], "2");
    let sq = ws.squared_form("G").unwrap().unwrap();
    assert_eq!(sq.epsilon, Some(-1));
    assert_eq!(sq.lines.len(), 7);
}

#[test]
fn heisenberg_double_retracts_and_tower_terminates() {
    let ws = Workspace::load("builtin:heisenberg").unwrap();
    let g = ws.amalgam("D").unwrap();
    let d = double_witness(&g).unwrap();
    d.verify().unwrap();
    assert!(d.kernel_facts.iter().all(|k| k.holds()));

    let t = polyrs_tower(&g).unwrap();
    t.verify().unwrap();
    assert_eq!(t.chain.len(), 2);
    // central, so the central witness also applies directly
    central_witness(&g).unwrap().verify().unwrap();
}

#[test]
fn cyclic_core_outside_centre() {
    let g = pairs("HKa");
    assert!(central_witness(&g).is_err());
    let w = cyclic_witness(&g).unwrap();
    w.verify().unwrap();
    assert!(w.kernel_facts[0].holds());
    let a = g.parse("a").unwrap();
    assert!(w.separates(&a).unwrap());
    let b = g.parse("b*q").unwrap();
    assert!(w.separates(&b).unwrap());
}

#[test]
fn central_core() {
    let g = pairs("HKc");
    let w = central_witness(&g).unwrap();
    w.verify().unwrap();
    assert_eq!(w.report["class"], 2);
}

#[test]
fn finite_index_denominators() {
    let g = pairs("HF");
    let w = finite_index_witness(&g).unwrap();
    w.verify().unwrap();
    assert_eq!(w.report["index"], "2");
    assert_eq!(w.report["denominator"], "2");
    let a = g.parse("a*b^-1").unwrap();
    assert!(w.separates(&a).unwrap());
}

#[test]
fn abelianization_separates_powers() {
    let g = pairs("ZZ");
    let a = g.parse_word("e").unwrap();
    match separate(&g, &a, 1, true).unwrap() {
        SeparateOutcome::Separated { witness, image } => {
            assert_eq!(witness.strategy, Strategy::Abelianization);
            assert!(image == "e1^3" || image == "e1^-3", "{image}");
        }
        SeparateOutcome::Unknown { .. } => panic!("not separated"),
    }
    assert!(separate(&g, &g.parse_word("e*e^-1").unwrap(), 4, true).is_err());
}

#[test]
fn parallel_search_agrees() {
    let g = pairs("HKa");
    let w = g.parse_word("b*q^-1*a").unwrap();
    for det in [true, false] {
        match separate(&g, &w, 4, det).unwrap() {
            SeparateOutcome::Separated { witness, .. } => witness.verify().unwrap(),
            SeparateOutcome::Unknown { attempts } => panic!("{attempts:?}"),
        }
    }
}
