use std::sync::Arc;

use nilamalgam_core::pc::*;
use nilamalgam_core::word::{parse_presentation, Presentation};
use nilamalgam_core::Error;
use num_bigint::BigInt;
use proptest::prelude::*;

fn heis() -> Arc<PcGroup> {
    let p = Presentation::new("H", vec!["a".into(), "b".into(), "c".into()], &["[b,a] = c"], Some(2)).unwrap();
    Arc::new(PcGroup::from_presentation(&p).unwrap())
}

fn freenilp() -> Arc<PcGroup> {
    let p = parse_presentation("group F { gens: x, y, u, v, w; rels: [y,x] = u, [u,x] = v, [u,y] = w; class: 3 }").unwrap();
    Arc::new(PcGroup::from_presentation(&p).unwrap())
}

type M3 = [[i64; 3]; 3];

fn mm(a: &M3, b: &M3) -> M3 {
    let mut r = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    r
}

/// inverse of a unitriangular 3x3 matrix
fn minv(a: &M3) -> M3 {
    let (x, y, z) = (a[0][1], a[1][2], a[0][2]);
    [[1, -x, x * y - z], [0, 1, -y], [0, 0, 1]]
}

fn mpow(a: &M3, k: i64) -> M3 {
    let base = if k < 0 { minv(a) } else { *a };
    let mut r = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    for _ in 0..k.abs() {
        r = mm(&r, &base);
    }
    r
}

const A: M3 = [[1, 1, 0], [0, 1, 0], [0, 0, 1]];
const B: M3 = [[1, 0, 0], [0, 1, 1], [0, 0, 1]];

fn oracle_c() -> M3 {
    // c = [b, a] = b^-1 a^-1 b a
    mm(&mm(&minv(&B), &minv(&A)), &mm(&B, &A))
}

fn to_matrix(x: &PcElement) -> M3 {
    let e: Vec<i64> = x.exponents().iter().map(|v| i64::try_from(v).unwrap()).collect();
    mm(&mm(&mpow(&A, e[0]), &mpow(&B, e[1])), &mpow(&oracle_c(), e[2]))
}

fn small_vec(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..=6, n)
}

proptest! {
    #[test]
    fn heisenberg_matches_matrices(x in small_vec(3), y in small_vec(3)) {
        let g = heis();
        let (ex, ey) = (g.element_i64(&x), g.element_i64(&y));
        prop_assert_eq!(to_matrix(&g.mul(&ex, &ey)), mm(&to_matrix(&ex), &to_matrix(&ey)));
        prop_assert_eq!(to_matrix(&g.inverse(&ex)), minv(&to_matrix(&ex)));
    }

    #[test]
    fn freenilp_group_axioms(x in small_vec(5), y in small_vec(5), z in small_vec(5)) {
        let g = freenilp();
        let (a, b, c) = (g.element_i64(&x), g.element_i64(&y), g.element_i64(&z));
        prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
        prop_assert!(g.mul(&a, &g.inverse(&a)).is_identity());
        prop_assert!(g.mul(&g.inverse(&a), &a).is_identity());
        // class 3: all 4-fold commutators vanish
        prop_assert!(g.comm(&g.comm(&g.comm(&a, &b), &c), &a).is_identity());
    }

    #[test]
    fn pow_matches_repeated_product(x in small_vec(5), k in -12i64..=12) {
        let g = freenilp();
        let a = g.element_i64(&x);
        let mut r = g.identity();
        let step = if k < 0 { g.inverse(&a) } else { a.clone() };
        for _ in 0..k.abs() {
            r = g.mul(&r, &step);
        }
        prop_assert_eq!(g.pow_i64(&a, k), r);
    }

    #[test]
    fn collect_agrees_with_products(word in prop::collection::vec((0usize..5, -4i64..=4), 0..12)) {
        let g = freenilp();
        let w = nilamalgam_core::word::free_reduce(word.iter().map(|&(i, e)| (i, BigInt::from(e))));
        let mut r = g.identity();
        for &(i, e) in &word {
            r = g.mul(&r, &g.pow_i64(&g.generator(i), e));
        }
        prop_assert_eq!(g.collect(&w), r);
    }

    #[test]
    fn coset_reps_are_canonical(x in small_vec(3), h in small_vec(3)) {
        let g = heis();
        let sub = PcSubgroup::from_words(&g, &["a^2", "c^3"]).unwrap();
        let hx = g.element_i64(&x);
        let hs: PcElement = sub.generators().iter().zip(&h).fold(g.identity(), |acc, (s, &e)| g.mul(&acc, &g.pow_i64(s, e)));
        prop_assert!(sub.contains(&hs));
        prop_assert_eq!(sub.coset_rep(&g.mul(&hs, &hx)), sub.coset_rep(&hx));
    }
}

#[test]
fn heisenberg_oracle_commutator() {
    let g = heis();
    let c = g.comm(&g.generator(1), &g.generator(0));
    assert_eq!(c, g.generator(2));
    assert_eq!(to_matrix(&c), oracle_c());
    assert_eq!(g.class(), 2);
    assert_eq!(g.hirsch_length(), 3);
    assert_eq!(g.fmt_elem(&g.parse("a b").unwrap()), "a^1*b^1");
    assert_eq!(g.fmt_elem(&g.parse("b a").unwrap()), "a^1*b^1*c^1");
}

#[test]
fn corrupted_presentation_is_rejected() {
    let p = parse_presentation(
        "group Bad { gens: a, b, x, u, v, w, z; rels: [b,a] = u, [x,a] = v, [x,b] = w, [u,x] = z }",
    )
    .unwrap();
    match PcGroup::from_presentation(&p) {
        Err(Error::Inconsistent { overlap, .. }) => assert!(overlap.contains('x') && overlap.contains('a')),
        other => panic!("expected inconsistency, got {other:?}"),
    }
    let ok = parse_presentation("group Ok { gens: a, b, x, u, v, w, z; rels: [b,a] = u, [x,a] = v, [x,b] = w }").unwrap();
    assert!(PcGroup::from_presentation(&ok).is_ok());
}

#[test]
fn class_declaration_and_tails_are_checked() {
    let p = parse_presentation("group H { gens: a, b, c; rels: [b,a] = c; class: 3 }").unwrap();
    assert_eq!(PcGroup::from_presentation(&p).unwrap_err(), Error::ClassMismatch { declared: 3, actual: 2 });
    let p = parse_presentation("group T { gens: a, b, c; rels: [c,a] = b }").unwrap();
    assert!(matches!(PcGroup::from_presentation(&p), Err(Error::TailOutOfRange { .. })));
}

#[test]
fn finite_layers() {
    // Z/4 on top of Z/2 with a^4 = z
    let p = parse_presentation("group Q { gens: a, z; rels: a^4 = z, z^2 }").unwrap();
    let g = Arc::new(PcGroup::from_presentation(&p).unwrap());
    let a = g.generator(0);
    assert_eq!(g.pow_i64(&a, 4), g.generator(1));
    assert!(g.pow_i64(&a, 8).is_identity());
    assert_eq!(g.pow_i64(&a, -1), g.element_i64(&[3, 1]));
    let whole = PcSubgroup::whole(&g);
    assert_eq!(whole.order(), Some(BigInt::from(8)));
    let sub = PcSubgroup::new(&g, &[g.pow_i64(&a, 2)]);
    assert_eq!(sub.order(), Some(BigInt::from(4)));
    assert_eq!(sub.index(), Some(BigInt::from(2)));
}

#[test]
fn series_of_free_nilpotent_group() {
    let g = freenilp();
    let lcs = lower_central_series(&g);
    assert_eq!(lcs.hirsch_lengths(), vec![5, 3, 2, 0]);
    let ucs = upper_central_series(&g);
    assert_eq!(ucs.hirsch_lengths(), vec![0, 2, 3, 5]);
    assert_eq!(center(&g).hirsch_length(), 2);
    let ds = derived_series(&g);
    assert_eq!(ds.class(), 2);
    assert_eq!(g.class(), 3);
}

#[test]
fn center_of_heisenberg_and_centralizer() {
    let g = heis();
    let z = center(&g);
    assert_eq!(z.generators(), vec![g.generator(2)]);
    let cz = centralizer(&PcSubgroup::whole(&g), &g.generator(0));
    assert_eq!(cz, PcSubgroup::from_words(&g, &["a", "c"]).unwrap());
    // centralizer of a^2 b^3 is <a^2 b^3, c>
    let x = g.parse("a^2 b^3").unwrap();
    let cx = centralizer(&PcSubgroup::whole(&g), &x);
    assert_eq!(cx.hirsch_length(), 2);
    assert!(cx.contains(&x));
    assert!(!cx.contains(&g.parse("a").unwrap()));
}

#[test]
fn subgroup_index_and_normality() {
    let g = heis();
    let s = PcSubgroup::from_words(&g, &["a^2", "b^3"]).unwrap();
    // contains [b^3, a^2] = c^6
    assert_eq!(s.index(), Some(BigInt::from(36)));
    assert!(!s.is_normal());
    let n = PcSubgroup::normal_closure(&g, &s.generators());
    assert!(n.is_normal());
    assert_eq!(n.index(), Some(BigInt::from(6)));
    let q = Quotient::new(&n, "Q").unwrap();
    assert_eq!(q.group.len(), 2);
    assert_eq!(q.projection.kernel(), n);
}

#[test]
fn homomorphism_kernel_image_preimage() {
    let h = heis();
    let f = freenilp();
    // F -> H, x -> a, y -> b kills v, w
    let hom = PcHom::from_words(&f, &h, &["a", "b", "c", "1", "1"]).unwrap();
    let k = hom.kernel();
    assert_eq!(k, PcSubgroup::from_words(&f, &["v", "w"]).unwrap());
    assert!(hom.is_surjective());
    assert!(hom.rank_certificate().holds());
    let y = h.parse("b^2 a c^5").unwrap();
    let x = hom.preimage_of(&y).unwrap();
    assert_eq!(hom.apply(&x), y);
    let pre = hom.preimage(&PcSubgroup::from_words(&h, &["c"]).unwrap());
    assert_eq!(pre.hirsch_length(), 3);
    // a wrong image is rejected
    assert!(matches!(PcHom::from_words(&f, &h, &["a", "b", "c^2", "1", "1"]), Err(Error::RelationFails { .. })));
}

#[test]
fn subgroup_presentation_round_trip() {
    let g = heis();
    let s = PcSubgroup::from_words(&g, &["a^2", "b"]).unwrap();
    let (sg, incl) = subgroup_as_group(&s, "S");
    assert_eq!(sg.len(), 3);
    assert!(incl.verify().is_ok());
    assert!(incl.is_injective());
    let p = sg.to_presentation();
    let again = PcGroup::from_presentation(&p).unwrap();
    assert_eq!(again.relation_strings(), sg.relation_strings());
}

#[test]
fn intersection_with_normal_subgroup() {
    let g = heis();
    let u = PcSubgroup::from_words(&g, &["a^2", "c^3"]).unwrap();
    let n = PcSubgroup::from_words(&g, &["a^3", "b", "c"]).unwrap();
    assert!(n.is_normal());
    let i = intersect_normal(&u, &n);
    assert_eq!(i, PcSubgroup::from_words(&g, &["a^6", "c^3"]).unwrap());
}
