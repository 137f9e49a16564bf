//! Machine-checkable certificates: serialization of witnesses, traps and
//! check reports, and re-verification against a workspace.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::abelian::{abelianize_amalgam, frattini_consequence_check, frattini_quotient, proper_certificate, quotient_d, AbelianReport};
use crate::amalgam::Amalgam;
use crate::error::{Error, Result};
use crate::malcev::MalcevGroup;
use crate::pc::{PcGroup, PcHom};
use crate::residual::{
    polyrs_compatibility, separate, FactKind, KernelFact, SeparateOutcome, Strategy, TrapCertificate, Witness,
};
use crate::target::{kernel_misses_amalgam, kernel_misses_factors, GroupHom, Target};
use crate::word::parse_presentation;
use crate::workspace::Workspace;
use crate::CONVENTION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Witness,
    Trap,
    Report,
}

/// How to rebuild the codomain of a chain step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Codomain {
    Pc { presentation: String },
    Amalgam { name: String, factors: Vec<String>, core: String, embeddings: Vec<Vec<String>> },
    Completion { lattice: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub domain: String,
    pub codomain: Codomain,
    /// generator name -> image
    pub hom: BTreeMap<String, String>,
    pub checks: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: Kind,
    pub check: String,
    pub workspace: String,
    pub target: String,
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Strategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived_length: Option<usize>,
    #[serde(default)]
    pub chain: Vec<ChainEntry>,
    #[serde(default)]
    pub kernel_facts: Vec<KernelFact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trap: Option<TrapCertificate>,
    pub conclusion: String,
    #[serde(default)]
    pub report: BTreeMap<String, Value>,
    pub convention: String,
}

/// Checks runnable by [`verify`], by tag.
pub const CHECKS: [&str; 10] = [
    "not-perfect",
    "theta",
    "central",
    "cyclic",
    "double",
    "abelian-factor",
    "finite-index",
    "polyrs",
    "counterexample",
    "abelianization",
];

impl Certificate {
    fn new(kind: Kind, check: &str, ws: &Workspace, target: &str) -> Certificate {
        Certificate {
            kind,
            check: check.to_string(),
            workspace: ws.source.clone(),
            target: target.to_string(),
            verified: false,
            strategy: None,
            element: None,
            image: None,
            derived_length: None,
            chain: vec![],
            kernel_facts: vec![],
            trap: None,
            conclusion: String::new(),
            report: BTreeMap::new(),
            convention: CONVENTION.to_string(),
        }
    }

    pub fn from_witness(check: &str, ws: &Workspace, target: &str, w: &Witness) -> Certificate {
        let mut c = Certificate::new(Kind::Witness, check, ws, target);
        c.verified = true;
        c.strategy = Some(w.strategy);
        c.derived_length = w.derived_length();
        c.chain = w
            .chain
            .iter()
            .map(|s| ChainEntry {
                domain: s.hom.domain().name(),
                codomain: encode_codomain(s.hom.codomain()),
                hom: s.hom.describe().into_iter().collect(),
                checks: s.checks.clone(),
            })
            .collect();
        c.kernel_facts = w.kernel_facts.clone();
        c.conclusion = w.conclusion.clone();
        c.report = w.report.clone();
        c
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Certificate> {
        serde_json::from_str(text).map_err(|e| Error::Parse { position: e.column(), message: format!("line {}: {e}", e.line()) })
    }
}

fn encode_codomain(t: &Target) -> Codomain {
    match t {
        Target::Pc(g) => Codomain::Pc { presentation: g.to_string() },
        Target::Malcev(m) => Codomain::Completion { lattice: m.lattice().to_string() },
        Target::Amalgam(a) => Codomain::Amalgam {
            name: a.name().to_string(),
            factors: a.factors().iter().map(|f| f.to_string()).collect(),
            core: a.core().to_string(),
            embeddings: a
                .embeddings()
                .iter()
                .map(|e| e.images().iter().map(|x| e.codomain().to_word(x).display(e.codomain().gens()).to_string()).collect())
                .collect(),
        },
    }
}

fn pc_from_text(text: &str) -> Result<Arc<PcGroup>> {
    Ok(Arc::new(PcGroup::from_presentation(&parse_presentation(text)?)?))
}

fn decode_codomain(c: &Codomain) -> Result<Target> {
    Ok(match c {
        Codomain::Pc { presentation } => Target::Pc(pc_from_text(presentation)?),
        Codomain::Completion { lattice } => Target::Malcev(Arc::new(MalcevGroup::new(&pc_from_text(lattice)?)?)),
        Codomain::Amalgam { name, factors, core, embeddings } => {
            let factors = factors.iter().map(|f| pc_from_text(f)).collect::<Result<Vec<_>>>()?;
            let core = pc_from_text(core)?;
            if embeddings.len() != factors.len() {
                return Err(Error::Invalid("one embedding per factor is required".into()));
            }
            let embeddings = factors
                .iter()
                .zip(embeddings)
                .map(|(f, ws)| PcHom::from_words(&core, f, &ws.iter().map(String::as_str).collect::<Vec<_>>()))
                .collect::<Result<Vec<_>>>()?;
            Target::Amalgam(Arc::new(Amalgam::new(name, factors, core, embeddings)?))
        }
    })
}

/// Rebuild and re-verify every map of a recorded chain; returns the maps.
fn recheck_chain(g: &Arc<Amalgam>, chain: &[ChainEntry]) -> Result<Vec<GroupHom>> {
    let mut domain = Target::Amalgam(g.clone());
    let mut homs = Vec::new();
    for (k, entry) in chain.iter().enumerate() {
        if entry.domain != domain.name() {
            return Err(Error::Invalid(format!("step {}: domain {} but expected {}", k + 1, entry.domain, domain.name())));
        }
        let codomain = decode_codomain(&entry.codomain)?;
        let images = domain
            .gen_names()
            .iter()
            .map(|gname| {
                let text = entry
                    .hom
                    .get(gname)
                    .ok_or_else(|| Error::Invalid(format!("step {}: no image for {gname}", k + 1)))?;
                codomain.parse(text)
            })
            .collect::<Result<Vec<_>>>()?;
        if entry.hom.len() != images.len() {
            return Err(Error::Invalid(format!("step {}: images for unknown generators", k + 1)));
        }
        let hom = GroupHom::new(domain.clone(), codomain.clone(), images)?;
        homs.push(hom);
        domain = codomain;
    }
    Ok(homs)
}

fn recheck_facts(last: &GroupHom, facts: &[KernelFact]) -> Result<()> {
    for f in facts {
        let fresh = match f.kind {
            FactKind::MissesFactors => kernel_misses_factors(last)?,
            FactKind::MissesCore => vec![kernel_misses_amalgam(last)?],
        };
        if fresh != f.certificates || !fresh.iter().all(|c| c.holds()) {
            return Err(Error::Invalid(format!("kernel fact does not re-verify: {}", f.statement)));
        }
    }
    Ok(())
}

/// Re-run the checks recorded in a certificate. Witness chains and traps
/// are verified directly; check reports are recomputed and compared.
pub fn recheck(cert: &Certificate, ws: &Workspace) -> Result<()> {
    if cert.convention != CONVENTION {
        return Err(Error::Invalid(format!("certificate uses convention `{}`", cert.convention)));
    }
    match cert.kind {
        Kind::Witness => {
            let g = ws.amalgam(&cert.target)?;
            let homs = recheck_chain(&g, &cert.chain)?;
            let last = homs.last().ok_or_else(|| Error::Invalid("empty chain".into()))?;
            recheck_facts(last, &cert.kernel_facts)?;
            if cert.strategy == Some(Strategy::PolyRs) {
                for (k, h) in homs[..homs.len() - 1].iter().enumerate() {
                    let line = crate::residual::check_stage(h)?;
                    if !cert.chain[k].checks.contains(&line) {
                        return Err(Error::Invalid(format!("step {}: stage check not recorded", k + 1)));
                    }
                }
            }
            let dl = last.codomain().derived_length();
            if dl.is_none() || dl != cert.derived_length {
                return Err(Error::Invalid(format!("derived length {dl:?} but {:?} recorded", cert.derived_length)));
            }
            if let Some(e) = &cert.element {
                let mut x = Target::Amalgam(g.clone()).parse(e)?;
                for h in &homs {
                    x = h.apply(&x)?;
                }
                let t = last.codomain();
                if t.is_identity(&x) {
                    return Err(Error::Invalid(format!("{e} dies at the end of the chain")));
                }
                if cert.image.as_deref() != Some(t.fmt_elem(&x).as_str()) {
                    return Err(Error::Invalid(format!("image of {e} is {}", t.fmt_elem(&x))));
                }
            }
            Ok(())
        }
        Kind::Trap => {
            let rec = cert.trap.as_ref().ok_or_else(|| Error::Invalid("trap certificate without trap".into()))?;
            let g = ws.amalgam(&cert.target)?;
            let p = |t: &str| g.parse_word(t);
            let fresh = crate::residual::trap_certificate(&g, &p(&rec.element)?, &p(&rec.w)?, &p(&rec.u)?, &p(&rec.v)?)?;
            if &fresh != rec || fresh.verified() != cert.verified {
                return Err(Error::Invalid("trap does not re-verify as recorded".into()));
            }
            Ok(())
        }
        Kind::Report if cert.check == "separate" => {
            let e = cert.element.as_deref().ok_or_else(|| Error::Invalid("no element recorded".into()))?;
            let max = cert.report.get("max_derived_length").and_then(Value::as_u64).unwrap_or(0) as usize;
            let fresh = separate_certificate(ws, &cert.target, e, max, true)?;
            if fresh.verified != cert.verified {
                return Err(Error::Invalid(format!("{e} is now separated")));
            }
            Ok(())
        }
        Kind::Report => {
            let fresh = verify(ws, &cert.check, Some(&cert.target))?;
            if fresh.verified != cert.verified || fresh.report != cert.report {
                return Err(Error::Invalid(format!("check {} gives a different result", cert.check)));
            }
            Ok(())
        }
    }
}

fn target_name(ws: &Workspace, target: Option<&str>) -> Result<String> {
    match target {
        Some(t) => Ok(t.to_string()),
        None => Ok(ws.default_amalgam()?.name().to_string()),
    }
}

/// Run a named check on an amalgam of the workspace. Errors are input or
/// precondition failures; a failed property gives `verified = false`.
pub fn verify(ws: &Workspace, check: &str, target: Option<&str>) -> Result<Certificate> {
    let name = target_name(ws, target)?;
    let g = ws.amalgam(&name)?;
    let strategy = match check {
        "central" => Some(Strategy::Central),
        "cyclic" => Some(Strategy::Cyclic),
        "double" => Some(Strategy::Double),
        "abelian-factor" => Some(Strategy::AbelianFactor),
        "finite-index" => Some(Strategy::FiniteIndex),
        "abelianization" => Some(Strategy::Abelianization),
        _ => None,
    };
    if let Some(k) = strategy {
        let w = k.build(&g)?;
        w.verify()?;
        let mut c = Certificate::from_witness(check, ws, &name, &w);
        if k == Strategy::AbelianFactor {
            if let Some(sq) = ws.squared_form(&name)? {
                c.verified = sq.holds();
                c.report.insert("squared_form".into(), serde_json::to_value(&sq).expect("serializable"));
            }
        }
        return Ok(c);
    }
    match check {
        "not-perfect" => not_perfect(ws, &name, &g),
        "theta" => theta(ws, &name, &g),
        "polyrs" => {
            let compat = polyrs_compatibility(&g)?;
            if compat.compatible {
                let w = Strategy::PolyRs.build(&g)?;
                w.verify()?;
                let mut c = Certificate::from_witness(check, ws, &name, &w);
                c.report.insert("stage_count".into(), json!(c.chain.len() - 1));
                Ok(c)
            } else {
                let mut c = Certificate::new(Kind::Report, check, ws, &name);
                c.conclusion = format!(
                    "filtrations are incompatible at i = {}",
                    compat.first_failure.expect("failure level")
                );
                c.report.insert("compatibility".into(), serde_json::to_value(&compat).expect("serializable"));
                Ok(c)
            }
        }
        "counterexample" => {
            let spec = ws
                .trap(&name)
                .ok_or_else(|| Error::Precondition(format!("{} records no trap for {name}", ws.source)))?;
            let mut c = Certificate::new(Kind::Trap, check, ws, &name);
            match ws.check_trap(spec) {
                Ok(t) => {
                    c.verified = t.verified();
                    c.conclusion = if t.verified() {
                        format!("{} is not residually solvable", g.name())
                    } else {
                        "the identity holds only for the trivial element".into()
                    };
                    c.trap = Some(t);
                }
                Err(Error::IdentityFails(msg)) => {
                    c.kind = Kind::Report;
                    c.conclusion = format!("identity fails: {msg}");
                }
                Err(e) => return Err(e),
            }
            Ok(c)
        }
        _ => Err(Error::Invalid(format!("unknown check `{check}`; expected one of {}", CHECKS.join(", ")))),
    }
}

fn not_perfect(ws: &Workspace, name: &str, g: &Amalgam) -> Result<Certificate> {
    let mut c = Certificate::new(Kind::Report, "not-perfect", ws, name);
    let ab = abelianize_amalgam(g);
    let mut ok = !ab.group.is_trivial() && ab.relations_die();
    c.report.insert("abelianization".into(), serde_json::to_value(AbelianReport::from(&ab)).expect("serializable"));
    for (f, fac) in g.factors().iter().enumerate() {
        let sub = g.core_image(f);
        let proper = proper_certificate(sub)
            .ok_or_else(|| Error::Precondition(format!("C is not proper in {}", fac.name())))?;
        let holds = frattini_consequence_check(fac, sub)?;
        ok &= holds;
        c.report.insert(
            format!("factor:{}", fac.name()),
            json!({
                "proper": proper,
                "quotient": frattini_quotient(fac, sub).to_string(),
                "nontrivial": holds,
            }),
        );
    }
    c.verified = ok;
    c.conclusion = if ok {
        format!("{} is not perfect", g.name())
    } else {
        format!("{} has trivial abelianization", g.name())
    };
    Ok(c)
}

fn theta(ws: &Workspace, name: &str, g: &Amalgam) -> Result<Certificate> {
    let mut c = Certificate::new(Kind::Report, "theta", ws, name);
    let d = quotient_d(g)?;
    c.verified = d.holds();
    c.report.insert("d".into(), json!(d.d.to_string()));
    c.report.insert("d_presented".into(), json!(d.d_presented.to_string()));
    c.report.insert("relations_die".into(), json!(d.relations_die));
    c.report.insert("surjective".into(), json!(d.surjective));
    let theta: BTreeMap<String, Vec<String>> =
        d.theta.iter().map(|(g, v)| (g.clone(), v.iter().map(ToString::to_string).collect())).collect();
    c.report.insert("theta".into(), json!(theta));
    c.conclusion = format!("G maps onto D = {}", d.d);
    Ok(c)
}

/// [`separate`] packaged as a certificate; `verified = false` means unknown.
pub fn separate_certificate(
    ws: &Workspace,
    target: &str,
    word: &str,
    max_derived_length: usize,
    deterministic: bool,
) -> Result<Certificate> {
    let g = ws.amalgam(target)?;
    let w = ws.parse_in(target, word)?;
    let element = w.display(g.letters()).to_string();
    match separate(&g, &w, max_derived_length, deterministic)? {
        SeparateOutcome::Separated { witness, image } => {
            let mut c = Certificate::from_witness("separate", ws, target, &witness);
            c.element = Some(element);
            c.image = Some(image);
            Ok(c)
        }
        SeparateOutcome::Unknown { attempts } => {
            let mut c = Certificate::new(Kind::Report, "separate", ws, target);
            c.element = Some(element);
            c.conclusion = "unknown".into();
            c.report.insert("max_derived_length".into(), json!(max_derived_length));
            let tried: BTreeMap<String, String> = attempts.into_iter().map(|(k, why)| (k.to_string(), why)).collect();
            c.report.insert("attempts".into(), json!(tried));
            Ok(c)
        }
    }
}
