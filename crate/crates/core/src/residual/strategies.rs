use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use serde_json::json;

use super::{ChainStep, FactKind, KernelFact, Strategy, Witness};
use crate::abelian::{abelianize_amalgam, relation_rows};
use crate::amalgam::Amalgam;
use crate::central::CentralProduct;
use crate::error::{Error, Result};
use crate::malcev::{CompletionExtension, MalcevGroup};
use crate::pc::{upper_central_series, PcElement, PcGroup, PcHom, PcRelations, Quotient};
use crate::target::{kernel_misses_amalgam, kernel_misses_factors, GroupHom, Target, TargetElem};
use crate::word::Word;
use crate::zmatrix::{cokernel, cokernel_map, IntMatrix};

/// Abelian pc group with the given relative orders (`None` = infinite).
fn abelian_pc(name: &str, prefix: &str, orders: Vec<Option<BigInt>>) -> Result<Arc<PcGroup>> {
    let gens = (1..=orders.len()).map(|k| format!("{prefix}{k}")).collect();
    let rel = PcRelations { name: name.to_string(), gens, orders, conj: BTreeMap::new(), powers: BTreeMap::new() };
    Ok(Arc::new(PcGroup::from_relations(rel, None)?))
}

fn invariant_orders(moduli: &[BigInt]) -> Vec<Option<BigInt>> {
    moduli.iter().map(|m| if m.is_zero() { None } else { Some(m.clone()) }).collect()
}

fn pc_images(imgs: &[PcElement]) -> Vec<TargetElem> {
    imgs.iter().cloned().map(TargetElem::Pc).collect()
}

fn core_is_central(g: &Amalgam, f: usize) -> bool {
    let fac = g.factor(f);
    g.core().generators().iter().all(|c| {
        let x = g.embedding(f).apply(c);
        fac.generators().iter().all(|y| fac.comm(&x, y).is_identity())
    })
}

fn free_kernel_fact(h: &GroupHom) -> Result<KernelFact> {
    Ok(KernelFact {
        kind: FactKind::MissesFactors,
        statement: "kernel meets no conjugate of a factor, hence is free".into(),
        certificates: kernel_misses_factors(h)?,
    })
}

/// `G -> G_ab`, read off the Smith form of the relation matrix.
pub fn abelianization_witness(g: &Arc<Amalgam>) -> Result<Witness> {
    let ab = abelianize_amalgam(g);
    if ab.group.is_trivial() {
        return Err(Error::Precondition(format!("{} is perfect", g.name())));
    }
    let q = abelian_pc(&format!("{}_ab", g.name()), "e", invariant_orders(&ab.map.moduli()))?;
    let images = ab
        .generator_images
        .iter()
        .map(|(_, v)| q.element(v).map(TargetElem::Pc))
        .collect::<Result<Vec<_>>>()?;
    let hom = GroupHom::new(Target::Amalgam(g.clone()), Target::Pc(q), images)?;
    let mut report = BTreeMap::new();
    report.insert("abelianization".into(), json!(ab.group.to_string()));
    Ok(Witness {
        amalgam: g.clone(),
        strategy: Strategy::Abelianization,
        chain: vec![ChainStep::new(hom)],
        kernel_facts: vec![],
        conclusion: format!("{} maps onto {}", g.name(), ab.group),
        report,
    })
}

/// Core central in every factor: map onto the central product.
pub fn central_witness(g: &Arc<Amalgam>) -> Result<Witness> {
    if let Some(f) = (0..g.factors().len()).find(|&f| !core_is_central(g, f)) {
        return Err(Error::Precondition(format!("core is not central in {}", g.factor(f).name())));
    }
    let cp = CentralProduct::from_amalgam(g, &format!("{}_central", g.name()))?;
    let per_factor = cp.canonical_maps.iter().map(|m| pc_images(m.images())).collect();
    let hom = GroupHom::extend(g, Target::Pc(cp.result.clone()), per_factor)?;
    let fact = free_kernel_fact(&hom)?;
    let mut report = BTreeMap::new();
    report.insert("class".into(), json!(cp.nilpotency_class()));
    report.insert("central_product".into(), json!(cp.result.to_string()));
    Ok(Witness {
        amalgam: g.clone(),
        strategy: Strategy::Central,
        chain: vec![ChainStep::new(hom)],
        kernel_facts: vec![fact],
        conclusion: format!("{} is free-by-(nilpotent of class {})", g.name(), cp.nilpotency_class()),
        report,
    })
}

/// Infinite cyclic core: pass to `A/zeta_m` where the core generator first
/// becomes central, and form the central product there.
pub fn cyclic_witness(g: &Arc<Amalgam>) -> Result<Witness> {
    let core = g.core();
    if core.len() != 1 || core.relative_order(0).is_some() {
        return Err(Error::Precondition("core is not infinite cyclic".into()));
    }
    let c = core.generator(0);
    let mut quotients = Vec::new();
    let mut central_maps = Vec::new();
    let mut levels = Vec::new();
    for (f, fac) in g.factors().iter().enumerate() {
        let a = g.embedding(f).apply(&c);
        let ucs = upper_central_series(fac);
        let m = (0..ucs.terms.len())
            .find(|&k| ucs.terms.get(k + 1).is_some_and(|t| t.contains(&a)))
            .ok_or_else(|| Error::Invalid("upper central series does not reach the factor".into()))?;
        let q = Quotient::new(&ucs.terms[m], &format!("{}_{}", fac.name(), m))?;
        central_maps.push(PcHom::new(core, &q.group, vec![q.project(&a)])?);
        quotients.push(q);
        levels.push(m);
    }
    let cp = CentralProduct::new(
        &format!("{}_cyclic", g.name()),
        quotients.iter().map(|q| q.group.clone()).collect(),
        core.clone(),
        central_maps,
    )?;
    let per_factor = quotients
        .iter()
        .zip(&cp.canonical_maps)
        .map(|(q, mu)| q.projection.images().iter().map(|x| TargetElem::Pc(mu.apply(x))).collect())
        .collect();
    let hom = GroupHom::extend(g, Target::Pc(cp.result.clone()), per_factor)?;
    let cert = kernel_misses_amalgam(&hom)?;

    let d = &cp.result;
    let img = cp.canonical_maps[0].apply(&cp.central_maps[0].apply(&c));
    let mut checks = vec![format!("{} defining relations preserved", hom.relation_count())];
    for k in 1..=10 {
        let p = d.pow_i64(&img, k);
        if p.is_identity() {
            return Err(Error::Invalid(format!("c^{k} dies in {}", d.name())));
        }
    }
    checks.push("c^k nontrivial for 1 <= k <= 10".into());
    let lead = img.leader().expect("nontrivial image");
    if d.relative_order(lead).is_some() {
        return Err(Error::Invalid(format!("image of c leads in a finite layer of {}", d.name())));
    }
    checks.push(format!("image of c leads in the infinite layer {}", d.gens()[lead]));

    let mut report = BTreeMap::new();
    report.insert("levels".into(), json!(levels));
    report.insert("central_product".into(), json!(d.to_string()));
    Ok(Witness {
        amalgam: g.clone(),
        strategy: Strategy::Cyclic,
        chain: vec![ChainStep { hom, checks }],
        kernel_facts: vec![KernelFact {
            kind: FactKind::MissesCore,
            statement: "kernel meets the amalgamated subgroup trivially".into(),
            certificates: vec![cert],
        }],
        conclusion: format!("{} is residually solvable: the kernel to {} misses C", g.name(), d.name()),
        report,
    })
}

/// Copies of one group over a common subgroup retract onto the base.
pub fn double_witness(g: &Arc<Amalgam>) -> Result<Witness> {
    let dd = g.double_data().ok_or_else(|| Error::Precondition(format!("{} is not a double", g.name())))?;
    let base = dd.base.clone();
    let per_factor = (0..g.factors().len()).map(|_| pc_images(&base.generators())).collect();
    let hom = GroupHom::extend(g, Target::Pc(base.clone()), per_factor)?;
    let fact = free_kernel_fact(&hom)?;
    let mut report = BTreeMap::new();
    report.insert("copies".into(), json!(g.factors().len()));
    Ok(Witness {
        amalgam: g.clone(),
        strategy: Strategy::Double,
        chain: vec![ChainStep::new(hom)],
        kernel_facts: vec![fact],
        conclusion: format!("{} is free-by-{}", g.name(), base.name()),
        report,
    })
}

/// Finite-index subgroup `A_1 = C x H` of a torsion-free abelian factor.
#[derive(Debug, Clone, Serialize)]
pub struct AbelianSplit {
    pub factor: String,
    pub index: String,
    pub a1: Vec<String>,
    pub complement_rank: usize,
    pub quotient: String,
}

/// The torsion of `A/C` gives `A -> T` with kernel `A_1 >= C` and `A_1/C`
/// free, so `C` is a direct factor of `A_1`; `G` maps onto `T` killing the
/// other factors.
pub fn abelian_factor_witness(g: &Arc<Amalgam>) -> Result<Witness> {
    let f = (0..g.factors().len())
        .find(|&f| g.factor(f).is_abelian() && g.factor(f).is_torsion_free_presentation())
        .ok_or_else(|| {
            let torsion = g
                .factors()
                .iter()
                .filter(|a| a.is_abelian())
                .map(|a| format!("{} has torsion invariants {}", a.name(), cokernel(&abelian_matrix(a))))
                .collect::<Vec<_>>();
            if torsion.is_empty() {
                Error::Precondition("no factor is abelian".into())
            } else {
                Error::Precondition(format!("no torsion-free abelian factor: {}", torsion.join("; ")))
            }
        })?;
    let a = g.factor(f);
    let c = g.core_image(f);
    let n = a.len();
    let l = IntMatrix::from_rows(n, &c.generators().iter().map(|x| x.exponents().to_vec()).collect::<Vec<_>>());
    let map = cokernel_map(&l);
    let t = map.group.torsion_invariants.len();
    let moduli: Vec<BigInt> = map.moduli().into_iter().take(t).collect();
    let q = abelian_pc(&format!("{}_T", a.name()), "t", invariant_orders(&moduli))?;
    let proj: Vec<PcElement> = a
        .generators()
        .iter()
        .map(|x| q.element(&map.image(x.exponents())[..t]))
        .collect::<Result<_>>()?;
    let to_t = PcHom::new(a, &q, proj.clone())?;
    let a1 = to_t.kernel();

    // C is a direct factor of A_1 iff A_1 / C is torsion-free
    let coords: Vec<Vec<BigInt>> = c.generators().iter().map(|x| a1.coordinates(x)).collect::<Result<_>>()?;
    let rel = cokernel(&IntMatrix::from_rows(a1.generators().len(), &coords));
    if !rel.torsion_invariants.is_empty() {
        return Err(Error::Invalid(format!("C is not a direct factor of A_1: quotient {rel}")));
    }

    let per_factor = (0..g.factors().len())
        .map(|k| if k == f { pc_images(&proj) } else { vec![TargetElem::Pc(q.identity()); g.factor(k).len()] })
        .collect();
    let hom = GroupHom::extend(g, Target::Pc(q.clone()), per_factor)?;
    let index = a1.index().unwrap_or_else(BigInt::zero);
    let split = AbelianSplit {
        factor: a.name().to_string(),
        index: index.to_string(),
        a1: a1.generators().iter().map(|x| a.fmt_elem(x)).collect(),
        complement_rank: rel.free_rank,
        quotient: map.group.to_string(),
    };
    let mut report = BTreeMap::new();
    report.insert("split".into(), serde_json::to_value(&split).expect("serializable"));
    let others: Vec<&str> = (0..g.factors().len()).filter(|&k| k != f).map(|k| g.factor(k).name()).collect();
    Ok(Witness {
        amalgam: g.clone(),
        strategy: Strategy::AbelianFactor,
        chain: vec![ChainStep::new(hom)],
        kernel_facts: vec![],
        conclusion: format!(
            "kernel is generated by A_1 = C x H (index {index} in {}) and the conjugates of {}",
            a.name(),
            others.join(", ")
        ),
        report,
    })
}

fn abelian_matrix(a: &PcGroup) -> IntMatrix {
    let mut m = IntMatrix::zeros(0, a.len());
    for r in relation_rows(a) {
        m.push_row(&r);
    }
    m
}

/// Finite-index core in a class-2 factor: extend the identification
/// linearly to the rational completions.
pub fn finite_index_witness(g: &Arc<Amalgam>) -> Result<Witness> {
    if g.factors().len() != 2 {
        return Err(Error::Precondition("finite-index extension needs two factors".into()));
    }
    let f = (0..2)
        .find(|&f| g.core_image(f).index().is_some())
        .ok_or_else(|| Error::Precondition("core has infinite index in both factors".into()))?;
    let o = 1 - f;
    let (a, b) = (g.factor(f), g.factor(o));
    let ma = Arc::new(MalcevGroup::new(a)?);
    let mb = Arc::new(MalcevGroup::new(b)?);
    let c = g.core_image(f);
    let images: Vec<PcElement> = c
        .generators()
        .iter()
        .map(|s| {
            let k = g.embedding(f).preimage_of(s).expect("core element");
            g.embedding(o).apply(&k)
        })
        .collect();
    let ext = CompletionExtension::new(&ma, &mb, c, &images)?;
    let mut per_factor = vec![Vec::new(), Vec::new()];
    per_factor[f] = a.generators().iter().map(|x| TargetElem::Malcev(ext.apply(x))).collect();
    per_factor[o] = b.generators().iter().map(|x| TargetElem::Malcev(mb.from_pc(x))).collect();
    let hom = GroupHom::extend(g, Target::Malcev(mb.clone()), per_factor)?;
    let fact = free_kernel_fact(&hom)?;
    let den = ext.denominator_lcm();
    let divides = (&ext.index % &den).is_zero();
    if !divides {
        return Err(Error::Invalid(format!("denominator {den} does not divide the index {}", ext.index)));
    }
    let mut checks = vec![format!("{} defining relations preserved", hom.relation_count())];
    checks.push(format!("extension agrees with the identification on {} core generators", g.core().len()));
    checks.push(format!("denominators divide the index: {den} | {}", ext.index));
    let mut report = BTreeMap::new();
    report.insert("index".into(), json!(ext.index.to_string()));
    report.insert("denominator".into(), json!(den.to_string()));
    report.insert("rank".into(), json!(ext.rank()));
    Ok(Witness {
        amalgam: g.clone(),
        strategy: Strategy::FiniteIndex,
        chain: vec![ChainStep { hom, checks }],
        kernel_facts: vec![fact],
        conclusion: format!("{} is free-by-(torsion-free nilpotent), mapping into the completion of {}", g.name(), b.name()),
        report,
    })
}

/// `(a^(x^i))^2 = a^2 * b^(eps*i)` for every `i` in `range`, with one sign.
#[derive(Debug, Clone, Serialize)]
pub struct SquaredFormCheck {
    pub epsilon: Option<i64>,
    pub lines: Vec<String>,
}

impl SquaredFormCheck {
    pub fn holds(&self) -> bool {
        self.epsilon.is_some()
    }
}

pub fn squared_form_check(g: &Amalgam, a: &Word, x: &Word, b: &Word, range: std::ops::RangeInclusive<i64>) -> SquaredFormCheck {
    let two = BigInt::from(2);
    let lhs = |i: i64| g.normal_form(&a.conjugate(&x.pow(&BigInt::from(i))).pow(&two));
    let rhs = |i: i64, eps: i64| g.normal_form(&a.pow(&two).mul(&b.pow(&BigInt::from(eps * i))));
    let epsilon = [1, -1].into_iter().find(|&eps| range.clone().all(|i| lhs(i) == rhs(i, eps)));
    let lines = range
        .map(|i| {
            let l = g.fmt_elem(&lhs(i));
            match epsilon {
                Some(e) => format!("i = {i}: (a^(x^{i}))^2 = {l} = a^2*b^{}", e * i),
                None => format!("i = {i}: (a^(x^{i}))^2 = {l}"),
            }
        })
        .collect();
    SquaredFormCheck { epsilon, lines }
}
