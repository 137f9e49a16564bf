//! Acceptance suite: one PASS/FAIL line per criterion.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nilamalgam_core::abelian::{frattini_consequence_check, is_perfect, quotient_d};
use nilamalgam_core::amalgam::Amalgam;
use nilamalgam_core::central::CentralProduct;
use nilamalgam_core::certificate::{recheck, verify, Certificate};
use nilamalgam_core::error::Error;
use nilamalgam_core::pc::{PcElement, PcGroup};
use nilamalgam_core::residual::{
    abelian_factor_witness, central_witness, cyclic_witness, double_witness, finite_index_witness,
    polyrs_compatibility, polyrs_tower, separate, SeparateOutcome,
};
use nilamalgam_core::target::{kernel_misses_factors, Target, TargetElem};
use nilamalgam_core::word::parse_presentation;
use nilamalgam_core::workspace::{Workspace, BUILTINS};
use nilamalgam_core::zmatrix::{smith_diagonal, smith_normal_form, IntMatrix};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:?}, limit {limit:?}"))
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

const POOL: &str = r#"{
  "format_version": 1,
  "groups": {
    "H": { "gens": ["a", "b", "c"], "rels": ["[b,a] = c"] },
    "K": { "gens": ["p", "q", "r"], "rels": ["[q,p] = r"] },
    "Za": { "gens": ["e"] },
    "Zb": { "gens": ["f"] },
    "Z": { "gens": ["t"] },
    "Z2": { "gens": ["g1", "g2"] },
    "Z3": { "gens": ["k1", "k2", "k3"] },
    "F": { "gens": ["x1", "x2", "x3", "y21", "y31", "y32"],
           "rels": ["[x2,x1] = y21", "[x3,x1] = y31", "[x3,x2] = y32"] }
  },
  "amalgams": {
    "HKa": { "factors": ["H", "K"], "identify": [["a", "p"]] },
    "HKc": { "factors": ["H", "K"], "identify": [["c", "r"]] },
    "HF":  { "factors": ["H", "K"], "identify": [["a^2", "p"], ["b", "q^2"], ["c", "r"]] },
    "ZZ":  { "factors": ["Za", "Zb"], "core": "Z", "embeddings": [["e^2"], ["f^3"]] },
    "Z2H": { "factors": ["Z2", "H"], "identify": [["g1", "c"]] },
    "FH":  { "factors": ["F", "H"], "identify": [["x1", "a"]] },
    "Z3Z2": { "factors": ["Z3", "Z2"], "identify": [["k1", "g1^2"], ["k2", "g2"]] },
    "HFc": { "factors": ["H", "F"], "identify": [["c", "y21"]] }
  }
}"#;

/// The ten amalgams used by the abelianization criteria.
fn pool() -> Result<Vec<Arc<Amalgam>>, String> {
    let ws = Workspace::from_json(POOL).map_err(e)?;
    let mut out = vec![
        Workspace::load("builtin:nil-neg").map_err(e)?.amalgam("G").map_err(e)?,
        Workspace::load("builtin:example-8-1").map_err(e)?.amalgam("G").map_err(e)?,
    ];
    for n in ["HKa", "HKc", "HF", "ZZ", "Z2H", "FH", "Z3Z2", "HFc"] {
        out.push(ws.amalgam(n).map_err(e)?);
    }
    Ok(out)
}

// ---- 1: Heisenberg collection against integer matrices

type M3 = [[i64; 3]; 3];

fn mmul(x: &M3, y: &M3) -> M3 {
    let mut z = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            z[i][j] = (0..3).map(|k| x[i][k] * y[k][j]).sum();
        }
    }
    z
}

fn mpow(x: &M3, k: i64) -> M3 {
    // inverse of an upper unitriangular matrix
    let inv = |m: &M3| -> M3 { [[1, -m[0][1], m[0][1] * m[1][2] - m[0][2]], [0, 1, -m[1][2]], [0, 0, 1]] };
    let base = if k < 0 { inv(x) } else { *x };
    let mut acc = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    for _ in 0..k.abs() {
        acc = mmul(&acc, &base);
    }
    acc
}

fn heis_matrix(exps: &[BigInt]) -> M3 {
    let a: M3 = [[1, 1, 0], [0, 1, 0], [0, 0, 1]];
    let b: M3 = [[1, 0, 0], [0, 1, 1], [0, 0, 1]];
    // c = [b, a] = b^-1 a^-1 b a
    let c = mmul(&mmul(&mpow(&b, -1), &mpow(&a, -1)), &mmul(&b, &a));
    let ex: Vec<i64> = exps.iter().map(|x| i64::try_from(x).unwrap()).collect();
    mmul(&mmul(&mpow(&a, ex[0]), &mpow(&b, ex[1])), &mpow(&c, ex[2]))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let ws = Workspace::load("builtin:heisenberg").map_err(e)?;
    let h = ws.groups["H"].clone();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let x: Vec<i64> = (0..3).map(|_| rng.gen_range(-6..=6)).collect();
        let y: Vec<i64> = (0..3).map(|_| rng.gen_range(-6..=6)).collect();
        let gx = h.element_i64(&x);
        let gy = h.element_i64(&y);
        let prod = h.mul(&gx, &gy);
        let want = mmul(&heis_matrix(gx.exponents()), &heis_matrix(gy.exponents()));
        ensure(heis_matrix(prod.exponents()) == want, format!("{x:?} * {y:?}"))?;
    }
    within(start, Duration::from_secs(5))?;
    Ok("1000 products agree with the matrix model".into())
}

// ---- 2: consistency gate

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut n = 0;
    for b in BUILTINS {
        let ws = Workspace::load(&format!("builtin:{b}")).map_err(e)?;
        for g in ws.groups.values() {
            g.check_consistency().map_err(e)?;
            n += 1;
        }
    }
    let f = &Workspace::load("builtin:freenilp-3-2").map_err(e)?.groups["F"];
    ensure(f.class() == 3 && f.hirsch_length() == 5, "freenilp-3-2 is not free nilpotent of class 3 on 2 generators")?;
    Workspace::load("builtin:heisenberg").map_err(e)?.groups["H"].check_consistency().map_err(e)?;
    let bad = "group Bad { gens: a, b, x, u, v, w, z; rels: [b,a] = u, [x,a] = v, [x,b] = w, [u,x] = z }";
    let p = parse_presentation(bad).map_err(e)?;
    match PcGroup::from_presentation(&p) {
        Err(Error::Inconsistent { overlap, .. }) => {
            let named = ["a", "b", "x"].iter().all(|g| overlap.contains(g));
            ensure(named, format!("overlap `{overlap}` does not name the triple"))?;
            within(start, Duration::from_secs(1))?;
            Ok(format!("{n} builtin presentations consistent; corrupted one rejected at {overlap}"))
        }
        other => Err(format!("corrupted presentation gave {other:?}")),
    }
}

// ---- 3: Smith normal form against determinantal divisors

fn det_i128(m: &[Vec<i128>]) -> i128 {
    // Bareiss fraction-free elimination
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else { return 0 };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors `d_k / d_{k-1}` from gcds of k x k minors.
fn oracle_invariants(m: &[Vec<i64>]) -> Vec<i128> {
    let (r, c) = (m.len(), m[0].len());
    let mut divisors = vec![1i128];
    for k in 1..=r.min(c) {
        let mut g = 0i128;
        for rows in subsets(r, k) {
            for cols in subsets(c, k) {
                let sub: Vec<Vec<i128>> =
                    rows.iter().map(|&i| cols.iter().map(|&j| m[i][j] as i128).collect()).collect();
                g = g.gcd(&det_i128(&sub));
            }
        }
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    divisors.windows(2).map(|w| w[1] / w[0]).collect()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in 0..500 {
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let m = IntMatrix::from_rows(c, &rows);
        let (s, u, v) = smith_normal_form(&m);
        ensure(u.is_unimodular() && v.is_unimodular(), format!("case {t}: transforms not unimodular"))?;
        ensure(u.mul(&m).mul(&v) == s, format!("case {t}: U*M*V != S"))?;
        for i in 0..s.rows() {
            for j in 0..s.cols() {
                ensure(i == j || s[(i, j)].is_zero(), format!("case {t}: S not diagonal"))?;
            }
        }
        let got: Vec<BigInt> = smith_diagonal(&s).into_iter().filter(|d| !d.is_zero()).collect();
        ensure(got.windows(2).all(|w| (&w[1] % &w[0]).is_zero()), format!("case {t}: no divisibility chain"))?;
        ensure(got.iter().all(|d| d.is_positive()), format!("case {t}: negative invariant"))?;
        let want: Vec<BigInt> = oracle_invariants(&rows).into_iter().map(BigInt::from).collect();
        ensure(got == want, format!("case {t}: {got:?} vs oracle {want:?}"))?;
    }
    within(start, Duration::from_secs(10))?;
    Ok("500 random matrices match the determinantal-divisor oracle".into())
}

// ---- 4, 5: abelianization of the pool

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let pool = pool()?;
    for g in &pool {
        ensure(!is_perfect(g), format!("{} reported perfect", g.name()))?;
        for f in 0..g.factors().len() {
            let ok = frattini_consequence_check(g.factor(f), g.core_image(f)).map_err(e)?;
            ensure(ok, format!("{}: A/gp(C,[A,A]) trivial for {}", g.name(), g.factor(f).name()))?;
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("{} amalgams not perfect, Frattini consequence on every factor", pool.len()))
}

fn criterion_5() -> Outcome {
    let pool = pool()?;
    for g in &pool {
        let d = quotient_d(g).map_err(e)?;
        ensure(d.relations_die, format!("{}: theta does not kill the relations", g.name()))?;
        ensure(d.surjective, format!("{}: theta not onto D", g.name()))?;
        ensure(d.d == d.d_presented, format!("{}: D = {} vs {}", g.name(), d.d, d.d_presented))?;
    }
    Ok(format!("theta verified and both constructions of D agree on {} amalgams", pool.len()))
}

// ---- 6: central products of Heisenberg copies

fn heisenberg_copies(copies: usize) -> Result<Workspace, String> {
    let text = format!(
        r#"{{ "format_version": 1,
             "groups": {{ "H": {{ "gens": ["a", "b", "c"], "rels": ["[b,a] = c"] }} }},
             "subgroups": {{ "Z": {{ "group": "H", "gens": ["c"] }} }},
             "amalgams": {{ "D": {{ "double": {{ "base": "H", "subgroup": "Z", "copies": {copies} }} }} }} }}"#
    );
    Workspace::from_json(&text).map_err(e)
}

fn criterion_6() -> Outcome {
    for copies in [2, 3] {
        let ws = heisenberg_copies(copies)?;
        let g = ws.amalgam("D").map_err(e)?;
        let cp = CentralProduct::from_amalgam(&g, "P").map_err(e)?;
        for i in 0..copies {
            let cert = cp.verify_factor_embedding(i);
            ensure(cert.injective, format!("{copies} copies: mu_{} not injective", i + 1))?;
            for j in i + 1..copies {
                ensure(cp.intersection_is_core(i, j), format!("{copies} copies: images {i},{j} meet beyond C"))?;
            }
        }
        ensure(cp.identification_holds() && cp.images_generate(), "identification or generation fails")?;
        ensure(cp.nilpotency_class() == 2, format!("class {}", cp.nilpotency_class()))?;
        let w = central_witness(&g).map_err(e)?;
        w.verify().map_err(e)?;
        let c = verify(&ws, "central", Some("D")).map_err(e)?;
        recheck(&Certificate::from_json(&c.to_json()).map_err(e)?, &ws).map_err(e)?;
    }
    Ok("2 and 3 copies: embeddings injective, pairwise intersections C, class 2, witness rechecks".into())
}

// ---- 7: cyclic amalgamation

fn criterion_7() -> Outcome {
    let g = Workspace::from_json(POOL).map_err(e)?.amalgam("HKa").map_err(e)?;
    let w = cyclic_witness(&g).map_err(e)?;
    w.verify().map_err(e)?;
    ensure(w.kernel_facts.iter().all(|k| k.holds()), "K ∩ C nontrivial")?;
    let checks = &w.chain[0].checks;
    ensure(checks.iter().any(|c| c.contains("1 <= k <= 10")), "powers not checked")?;
    ensure(checks.iter().any(|c| c.contains("infinite layer")), "layer not checked")?;
    Ok("K ∩ C = 1; c^1..c^10 survive in a torsion-free layer".into())
}

// ---- 8: Heisenberg double retraction

fn criterion_8() -> Outcome {
    let ws = heisenberg_copies(2)?;
    let g = ws.amalgam("D").map_err(e)?;
    let h = ws.groups["H"].clone();
    let w = double_witness(&g).map_err(e)?;
    w.verify().map_err(e)?;
    let psi = &w.chain[0].hom;
    let base = Target::Pc(h.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let random = |rng: &mut ChaCha8Rng| -> Result<PcElement, String> {
        let v: Vec<i64> = (0..3).map(|_| rng.gen_range(-5..=5)).collect();
        Ok(h.element_i64(&v))
    };
    for _ in 0..200 {
        let x = random(&mut rng)?;
        for copy in 0..2 {
            let y = psi.apply(&TargetElem::Amalgam(g.from_factor(copy, &x))).map_err(e)?;
            ensure(y == TargetElem::Pc(x.clone()), "psi o iota != id")?;
        }
    }
    for _ in 0..200 {
        let x = random(&mut rng)?;
        let z = g.mul(&g.from_factor(0, &x), &g.inverse(&g.from_factor(1, &x)));
        let y = psi.apply(&TargetElem::Amalgam(z)).map_err(e)?;
        ensure(base.is_identity(&y), "a (a phi)^-1 survives")?;
    }
    let certs = kernel_misses_factors(psi).map_err(e)?;
    ensure(certs.iter().all(|c| c.holds()), "kernel meets a factor")?;
    Ok("psi o iota = id and psi(a (a phi)^-1) = 1 on 200 samples each; kernel misses factors".into())
}

// ---- 9: finite-index extension

fn criterion_9() -> Outcome {
    let g = Workspace::from_json(POOL).map_err(e)?.amalgam("HF").map_err(e)?;
    let w = finite_index_witness(&g).map_err(e)?;
    w.verify().map_err(e)?;
    let hom = &w.chain[0].hom;
    for c in g.core().generators() {
        let via = |f: usize| {
            let x = g.from_factor(f, &g.embedding(f).apply(&c));
            hom.apply(&TargetElem::Amalgam(x))
        };
        ensure(via(0).map_err(e)? == via(1).map_err(e)?, "extension disagrees on a core generator")?;
    }
    let certs = kernel_misses_factors(hom).map_err(e)?;
    ensure(certs.len() == 2 && certs.iter().all(|c| c.holds()), "kernel meets a factor")?;
    let index: BigInt = w.report["index"].as_str().unwrap().parse().unwrap();
    let den: BigInt = w.report["denominator"].as_str().unwrap().parse().unwrap();
    ensure(index.is_multiple_of(&den), format!("denominator {den} does not divide {index}"))?;
    ensure(!den.is_one(), "no fractional coordinates appeared")?;
    Ok(format!("extension agrees on C, misses both factors, denominator {den} | index {index}"))
}

// ---- 10: the counterexample

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let ws = Workspace::load("builtin:nil-neg").map_err(e)?;
    let g = ws.amalgam("G").map_err(e)?;
    let trap = ws.check_trap(ws.trap("G").ok_or("no trap recorded")?).map_err(e)?;
    ensure(trap.verified(), "trap degenerate")?;
    let a = g.parse_word("a").map_err(e)?;
    match separate(&g, &a, 4, true).map_err(e)? {
        SeparateOutcome::Unknown { .. } => {}
        SeparateOutcome::Separated { witness, .. } => return Err(format!("separated by {}", witness.strategy)),
    }
    let compat = polyrs_compatibility(&g).map_err(e)?;
    ensure(!compat.compatible && compat.first_failure == Some(1), "compatibility should fail at i = 1")?;
    let ab = nilamalgam_core::abelian::abelianize_amalgam(&g);
    ensure(!ab.group.is_trivial(), "abelianization trivial")?;
    within(start, Duration::from_secs(10))?;
    Ok(format!(
        "a^x = [a, a^y] ({:?}); separate(a) unknown; incompatible at i = 1; G_ab = {}",
        trap.orientation, ab.group
    ))
}

// ---- 11: tower on the Heisenberg double

fn criterion_11() -> Outcome {
    let ws = heisenberg_copies(2)?;
    let g = ws.amalgam("D").map_err(e)?;
    ensure(polyrs_compatibility(&g).map_err(e)?.compatible, "double reported incompatible")?;
    let w = polyrs_tower(&g).map_err(e)?;
    w.verify().map_err(e)?;
    for s in &w.chain {
        s.hom.verify().map_err(e)?;
    }
    let c = verify(&ws, "polyrs", Some("D")).map_err(e)?;
    recheck(&Certificate::from_json(&c.to_json()).map_err(e)?, &ws).map_err(e)?;
    Ok(format!("compatible; {}-step chain re-verifies", w.chain.len()))
}

// ---- 12: the abelian-factor example

fn criterion_12() -> Outcome {
    let ws = Workspace::load("builtin:example-8-1").map_err(e)?;
    let g = ws.amalgam("G").map_err(e)?;
    let w = abelian_factor_witness(&g).map_err(e)?;
    w.verify().map_err(e)?;
    ensure(w.report["split"]["index"] == "2", format!("[A:A_1] = {}", w.report["split"]["index"]))?;
    let sq = ws.squared_form("G").map_err(e)?.ok_or("no squared-form check recorded")?;
    let eps = sq.epsilon.ok_or("no single sign works for i in -3..3")?;
    let c = verify(&ws, "abelian-factor", None).map_err(e)?;
    ensure(c.verified && c.report["squared_form"]["epsilon"] == eps, "sign not recorded in the report")?;
    Ok(format!("[A:A_1] = 2; (a^(x^i))^2 = a^2 b^(eps i) for -3 <= i <= 3 with eps = {eps}"))
}

fn main() {
    let criteria: [(&str, Check); 12] = [
        ("Heisenberg arithmetic", criterion_1),
        ("consistency gate", criterion_2),
        ("Smith normal form", criterion_3),
        ("not perfect", criterion_4),
        ("theta and D", criterion_5),
        ("central products", criterion_6),
        ("cyclic amalgamation", criterion_7),
        ("Heisenberg double", criterion_8),
        ("finite-index extension", criterion_9),
        ("counterexample", criterion_10),
        ("poly-RS tower", criterion_11),
        ("abelian factor example", criterion_12),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("criterion {:>2} PASS {name} ({t:.2}s): {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({t:.2}s): {msg}", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
