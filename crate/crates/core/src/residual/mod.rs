//! Residual-solvability evidence: quotient chains that keep a chosen element
//! alive in a solvable group, and derived-series traps that rule residual
//! solvability out.

mod polyrs;
mod strategies;
mod trap;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amalgam::{Amalgam, AmalgamElement};
use crate::error::{Error, Result};
use crate::target::{GroupHom, InjectivityCertificate, Target, TargetElem};
use crate::word::Word;

pub use polyrs::{check_stage, polyrs_compatibility, polyrs_tower, Compatibility};
pub use strategies::{
    abelian_factor_witness, abelianization_witness, central_witness, cyclic_witness, double_witness,
    finite_index_witness, squared_form_check, AbelianSplit, SquaredFormCheck,
};
pub use trap::{trap_certificate, Orientation, TrapCertificate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Abelianization,
    Central,
    Cyclic,
    Double,
    AbelianFactor,
    FiniteIndex,
    PolyRs,
}

impl Strategy {
    /// Order tried by [`separate`]: single nilpotent or abelian quotients
    /// first, towers last.
    pub const ORDER: [Strategy; 7] = [
        Strategy::Abelianization,
        Strategy::Central,
        Strategy::Cyclic,
        Strategy::Double,
        Strategy::AbelianFactor,
        Strategy::FiniteIndex,
        Strategy::PolyRs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Abelianization => "abelianization",
            Strategy::Central => "central",
            Strategy::Cyclic => "cyclic",
            Strategy::Double => "double",
            Strategy::AbelianFactor => "abelian-factor",
            Strategy::FiniteIndex => "finite-index",
            Strategy::PolyRs => "poly-rs",
        }
    }

    pub fn build(self, g: &Arc<Amalgam>) -> Result<Witness> {
        match self {
            Strategy::Abelianization => abelianization_witness(g),
            Strategy::Central => central_witness(g),
            Strategy::Cyclic => cyclic_witness(g),
            Strategy::Double => double_witness(g),
            Strategy::AbelianFactor => abelian_factor_witness(g),
            Strategy::FiniteIndex => finite_index_witness(g),
            Strategy::PolyRs => polyrs_tower(g),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ORDER
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown strategy `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct ChainStep {
    pub hom: GroupHom,
    pub checks: Vec<String>,
}

impl ChainStep {
    pub fn new(hom: GroupHom) -> ChainStep {
        let checks = vec![format!("{} defining relations preserved", hom.relation_count())];
        ChainStep { hom, checks }
    }
}

/// A deduction licensed by rank certificates, e.g. "kernel meets no
/// conjugate of a factor, hence is free".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactKind {
    /// the last map is injective on every factor
    MissesFactors,
    /// the last map is injective on the amalgamated subgroup
    MissesCore,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelFact {
    pub kind: FactKind,
    pub statement: String,
    pub certificates: Vec<InjectivityCertificate>,
}

impl KernelFact {
    pub fn holds(&self) -> bool {
        self.certificates.iter().all(InjectivityCertificate::holds)
    }
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub amalgam: Arc<Amalgam>,
    pub strategy: Strategy,
    pub chain: Vec<ChainStep>,
    pub kernel_facts: Vec<KernelFact>,
    pub conclusion: String,
    pub report: BTreeMap<String, serde_json::Value>,
}

impl Witness {
    pub fn final_target(&self) -> &Target {
        self.chain.last().map(|s| s.hom.codomain()).expect("nonempty chain")
    }

    /// Image of an amalgam element at the end of the chain.
    pub fn image(&self, x: &AmalgamElement) -> Result<TargetElem> {
        let mut cur = TargetElem::Amalgam(x.clone());
        for s in &self.chain {
            cur = s.hom.apply(&cur)?;
        }
        Ok(cur)
    }

    pub fn separates(&self, x: &AmalgamElement) -> Result<bool> {
        let y = self.image(x)?;
        Ok(!self.final_target().is_identity(&y))
    }

    pub fn derived_length(&self) -> Option<usize> {
        self.final_target().derived_length()
    }

    /// Re-run every relation check and rank certificate.
    pub fn verify(&self) -> Result<()> {
        let mut expected = Target::Amalgam(self.amalgam.clone()).name();
        for s in &self.chain {
            if s.hom.domain().name() != expected {
                return Err(Error::Invalid(format!("chain breaks at {}", s.hom.domain().name())));
            }
            s.hom.verify()?;
            expected = s.hom.codomain().name();
        }
        for k in &self.kernel_facts {
            if !k.holds() {
                return Err(Error::Invalid(format!("kernel fact fails: {}", k.statement)));
            }
        }
        if self.derived_length().is_none() {
            return Err(Error::Invalid("chain does not end in a solvable group".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum SeparateOutcome {
    Separated { witness: Box<Witness>, image: String },
    /// No strategy produced a separating quotient; `attempts` records why.
    Unknown { attempts: Vec<(Strategy, String)> },
}

/// Search for a solvable quotient (derived length at most `max_derived_length`)
/// in which `w` survives. Never concludes that none exists.
pub fn separate(g: &Arc<Amalgam>, w: &Word, max_derived_length: usize, deterministic: bool) -> Result<SeparateOutcome> {
    let x = g.normal_form(w);
    if g.is_identity(&x) {
        return Err(Error::Invalid(format!("{} is trivial in {}", w.display(g.letters()), g.name())));
    }
    let attempt = |k: Strategy| -> std::result::Result<(Witness, String), String> {
        let wit = k.build(g).map_err(|e| e.to_string())?;
        let dl = wit.derived_length().ok_or("no solvable endpoint")?;
        if dl > max_derived_length {
            return Err(format!("quotient has derived length {dl} > {max_derived_length}"));
        }
        let img = wit.image(&x).map_err(|e| e.to_string())?;
        if wit.final_target().is_identity(&img) {
            return Err("element dies in the quotient".into());
        }
        let text = wit.final_target().fmt_elem(&img);
        Ok((wit, text))
    };
    let found = if deterministic {
        Strategy::ORDER.into_iter().find_map(|k| attempt(k).ok())
    } else {
        Strategy::ORDER.par_iter().find_map_any(|&k| attempt(k).ok())
    };
    if let Some((witness, image)) = found {
        return Ok(SeparateOutcome::Separated { witness: Box::new(witness), image });
    }
    let attempts = Strategy::ORDER
        .into_iter()
        .map(|k| (k, attempt(k).err().unwrap_or_else(|| "separates".into())))
        .collect();
    Ok(SeparateOutcome::Unknown { attempts })
}
