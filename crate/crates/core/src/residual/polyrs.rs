use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use super::{central_witness, ChainStep, Strategy, Witness};
use crate::amalgam::Amalgam;
use crate::error::{Error, Result};
use crate::pc::{center, upper_central_series, PcElement, PcHom, PcSubgroup, Quotient};
use crate::target::{GroupHom, Target, TargetElem};

/// Whether `zeta_i(A) ∩ C_A` and `zeta_i(B) ∩ C_B` correspond under the
/// identification for every `i`.
#[derive(Debug, Clone, Serialize)]
pub struct Compatibility {
    pub compatible: bool,
    /// first failing level, counted from 1
    pub first_failure: Option<usize>,
    /// per level, per factor: generators of `zeta_i ∩ C` pulled back to the core
    pub levels: Vec<Vec<String>>,
    pub detail: Option<String>,
}

fn pullbacks(g: &Amalgam, i: usize) -> Vec<PcSubgroup> {
    (0..g.factors().len())
        .map(|f| {
            let ucs = upper_central_series(g.factor(f));
            let term = &ucs.terms[i.min(ucs.terms.len() - 1)];
            g.embedding(f).preimage(term)
        })
        .collect()
}

pub fn polyrs_compatibility(g: &Amalgam) -> Result<Compatibility> {
    let depth = g.factors().iter().map(|f| f.class()).max().unwrap_or(0);
    let mut levels = Vec::new();
    for i in 1..=depth {
        let pb = pullbacks(g, i);
        levels.push(pb.iter().map(PcSubgroup::describe).collect());
        if let Some(f) = (1..pb.len()).find(|&f| pb[f] != pb[0]) {
            let side = |k: usize| {
                let im = g.embedding(k).image_of(&pb[k]);
                format!("zeta_{i}({}) ∩ C = {}", g.factor(k).name(), im.describe())
            };
            let detail = format!(
                "{} but {}; these do not correspond under the identification",
                side(0),
                side(f)
            );
            return Ok(Compatibility { compatible: false, first_failure: Some(i), levels, detail: Some(detail) });
        }
    }
    Ok(Compatibility { compatible: true, first_failure: None, levels, detail: None })
}

/// Quotient of every factor by the image of the central part `n` of the core.
fn tower_step(g: &Arc<Amalgam>, n: &PcSubgroup, name: &str) -> Result<(Arc<Amalgam>, GroupHom)> {
    let core = g.core();
    let qc = Quotient::new(n, "C")?;
    let mut quotients = Vec::new();
    let mut factors = Vec::new();
    let mut embeddings = Vec::new();
    for (f, fac) in g.factors().iter().enumerate() {
        let nf = g.embedding(f).image_of(n);
        let q = Quotient::new(&nf, &format!("{}_q", fac.name()))?;
        let imgs = qc.kept.iter().map(|&l| q.project(&g.embedding(f).apply(&core.generator(l)))).collect();
        embeddings.push(PcHom::new(&qc.group, &q.group, imgs)?);
        factors.push(q.group.clone());
        quotients.push(q);
    }
    let next = Arc::new(Amalgam::new(name, factors, qc.group.clone(), embeddings)?);
    let per_factor = quotients
        .iter()
        .enumerate()
        .map(|(f, q)| {
            q.projection.images().iter().map(|x| TargetElem::Amalgam(next.from_factor(f, x))).collect()
        })
        .collect();
    let hom = GroupHom::extend(g, Target::Amalgam(next.clone()), per_factor)?;
    Ok((next, hom))
}

/// A tower stage restricts to each factor as a surjection onto the matching
/// factor, killing the same central subgroup of the core in every factor.
pub fn check_stage(h: &GroupHom) -> Result<String> {
    let (Target::Amalgam(src), Target::Amalgam(dst)) = (h.domain(), h.codomain()) else {
        return Err(Error::Invalid("a tower stage maps an amalgam to an amalgam".into()));
    };
    if src.factors().len() != dst.factors().len() {
        return Err(Error::Invalid(format!("{} and {} have different factor counts", src.name(), dst.name())));
    }
    let mut killed: Option<PcSubgroup> = None;
    for f in 0..src.factors().len() {
        let imgs = h.factor_images(f).expect("amalgam domain");
        let inside = imgs
            .iter()
            .map(|y| {
                let y = y.as_amalgam().expect("amalgam codomain");
                let head = dst.embedding(f).apply(&y.head);
                match y.tail.as_slice() {
                    [] => Some(head),
                    [(k, r)] if *k == f => Some(dst.factor(f).mul(&head, r)),
                    _ => None,
                }
            })
            .collect::<Option<Vec<PcElement>>>()
            .ok_or_else(|| Error::Invalid(format!("{} is not mapped into {}", src.factor(f).name(), dst.factor(f).name())))?;
        let restricted = PcHom::new(src.factor(f), dst.factor(f), inside)?;
        if !restricted.is_surjective() {
            return Err(Error::Invalid(format!("{} does not map onto {}", src.factor(f).name(), dst.factor(f).name())));
        }
        let kernel = restricted.kernel();
        if !kernel.is_subgroup_of(&center(src.factor(f))) || !kernel.is_subgroup_of(src.core_image(f)) {
            return Err(Error::Invalid(format!(
                "kernel {} on {} is not central in the core",
                kernel.describe(),
                src.factor(f).name()
            )));
        }
        let pulled = src.embedding(f).preimage(&kernel);
        match &killed {
            None => killed = Some(pulled),
            Some(k) if *k == pulled => {}
            Some(_) => return Err(Error::Invalid(format!("{} kills a different part of the core", src.factor(f).name()))),
        }
    }
    let k = killed.expect("at least one factor");
    Ok(format!("each factor maps onto its quotient by the central subgroup {} of the core", k.describe()))
}

const MAX_STAGES: usize = 32;

/// Quotient repeatedly by the part of the core lying in the centres of the
/// factors until the factors are abelian (or nothing is left to factor out
/// and the core is central), then map onto the central product.
pub fn polyrs_tower(g: &Arc<Amalgam>) -> Result<Witness> {
    let compat = polyrs_compatibility(g)?;
    if let Some(i) = compat.first_failure {
        return Err(Error::Precondition(format!(
            "incompatible at i = {i}: {}",
            compat.detail.clone().unwrap_or_default()
        )));
    }
    let mut cur = g.clone();
    let mut chain = Vec::new();
    let mut stages = Vec::new();
    for k in 1..=MAX_STAGES {
        let pb = pullbacks(&cur, 1);
        let abelian = cur.factors().iter().all(|f| f.is_abelian());
        let stalled = pb[0].is_trivial();
        let finished = if abelian || stalled { central_witness(&cur).ok() } else { None };
        if let Some(fin) = finished {
            chain.extend(fin.chain);
            let mut report = BTreeMap::new();
            report.insert("compatibility".into(), serde_json::to_value(&compat).expect("serializable"));
            report.insert("stages".into(), json!(stages));
            return Ok(Witness {
                amalgam: g.clone(),
                strategy: Strategy::PolyRs,
                chain,
                kernel_facts: fin.kernel_facts,
                conclusion: format!(
                    "{} is poly-(residually solvable): {} central quotients reach {}, which is free-by-nilpotent",
                    g.name(),
                    stages.len(),
                    cur.name()
                ),
                report,
            });
        }
        if let Some(f) = (1..pb.len()).find(|&f| pb[f] != pb[0]) {
            return Err(Error::Precondition(format!(
                "stage {k}: central parts of the core differ between {} and {}",
                cur.factor(0).name(),
                cur.factor(f).name()
            )));
        }
        if pb[0].is_trivial() {
            return Err(Error::Precondition(format!("stage {k}: the core meets no centre, the tower stalls")));
        }
        let (next, hom) = tower_step(&cur, &pb[0], &format!("{}_{k}", g.name()))?;
        stages.push(format!("{} -> {}: factor out {}", cur.name(), next.name(), pb[0].describe()));
        let mut step = ChainStep::new(hom);
        step.checks.push(check_stage(&step.hom)?);
        chain.push(step);
        cur = next;
    }
    Err(Error::Precondition(format!("no abelian stage after {MAX_STAGES} stages")))
}
