//! A uniform view of the groups that appear in quotient chains: pc groups,
//! amalgams and rational completions, with homomorphisms between them.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::amalgam::{Amalgam, AmalgamElement};
use crate::error::{Error, Result};
use crate::malcev::{MalcevElement, MalcevGroup};
use crate::pc::{DefiningRelation, PcElement, PcGroup, PcSubgroup};
use crate::word::Word;

#[derive(Debug, Clone)]
pub enum Target {
    Pc(Arc<PcGroup>),
    Amalgam(Arc<Amalgam>),
    Malcev(Arc<MalcevGroup>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TargetElem {
    Pc(PcElement),
    Amalgam(AmalgamElement),
    Malcev(MalcevElement),
}

impl TargetElem {
    pub fn as_pc(&self) -> Option<&PcElement> {
        match self {
            TargetElem::Pc(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_amalgam(&self) -> Option<&AmalgamElement> {
        match self {
            TargetElem::Amalgam(x) => Some(x),
            _ => None,
        }
    }
}

macro_rules! dispatch2 {
    ($self:ident, $x:ident, $y:ident, $m:ident) => {
        match ($self, $x, $y) {
            (Target::Pc(g), TargetElem::Pc(a), TargetElem::Pc(b)) => TargetElem::Pc(g.$m(a, b)),
            (Target::Amalgam(g), TargetElem::Amalgam(a), TargetElem::Amalgam(b)) => TargetElem::Amalgam(g.$m(a, b)),
            (Target::Malcev(g), TargetElem::Malcev(a), TargetElem::Malcev(b)) => TargetElem::Malcev(g.$m(a, b)),
            _ => panic!("element of another group"),
        }
    };
}

impl Target {
    pub fn name(&self) -> String {
        match self {
            Target::Pc(g) => g.name().to_string(),
            Target::Amalgam(g) => g.name().to_string(),
            Target::Malcev(m) => format!("m({})", m.lattice().name()),
        }
    }

    /// Generator names of the domain view: pc generators, amalgam letters, or
    /// the lattice generators of a completion.
    pub fn gen_names(&self) -> Vec<String> {
        match self {
            Target::Pc(g) => g.gens().to_vec(),
            Target::Amalgam(g) => g.letters().to_vec(),
            Target::Malcev(m) => m.lattice().gens().to_vec(),
        }
    }

    pub fn generator(&self, k: usize) -> TargetElem {
        match self {
            Target::Pc(g) => TargetElem::Pc(g.generator(k)),
            Target::Amalgam(g) => {
                let (f, i) = g.letter_owner(k);
                TargetElem::Amalgam(g.from_factor(f, &g.factor(f).generator(i)))
            }
            Target::Malcev(m) => TargetElem::Malcev(m.from_pc(&m.lattice().generator(k))),
        }
    }

    pub fn identity(&self) -> TargetElem {
        match self {
            Target::Pc(g) => TargetElem::Pc(g.identity()),
            Target::Amalgam(g) => TargetElem::Amalgam(g.identity()),
            Target::Malcev(m) => TargetElem::Malcev(m.identity()),
        }
    }

    pub fn is_identity(&self, x: &TargetElem) -> bool {
        match (self, x) {
            (Target::Pc(_), TargetElem::Pc(a)) => a.is_identity(),
            (Target::Amalgam(g), TargetElem::Amalgam(a)) => g.is_identity(a),
            (Target::Malcev(_), TargetElem::Malcev(a)) => a.0.iter().all(Zero::is_zero),
            _ => false,
        }
    }

    pub fn mul(&self, x: &TargetElem, y: &TargetElem) -> TargetElem {
        dispatch2!(self, x, y, mul)
    }

    pub fn comm(&self, x: &TargetElem, y: &TargetElem) -> TargetElem {
        dispatch2!(self, x, y, comm)
    }

    pub fn conj(&self, x: &TargetElem, y: &TargetElem) -> TargetElem {
        dispatch2!(self, x, y, conj)
    }

    pub fn inverse(&self, x: &TargetElem) -> TargetElem {
        match (self, x) {
            (Target::Pc(g), TargetElem::Pc(a)) => TargetElem::Pc(g.inverse(a)),
            (Target::Amalgam(g), TargetElem::Amalgam(a)) => TargetElem::Amalgam(g.inverse(a)),
            (Target::Malcev(g), TargetElem::Malcev(a)) => TargetElem::Malcev(g.inverse(a)),
            _ => panic!("element of another group"),
        }
    }

    pub fn pow(&self, x: &TargetElem, k: &BigInt) -> TargetElem {
        match (self, x) {
            (Target::Pc(g), TargetElem::Pc(a)) => TargetElem::Pc(g.pow(a, k)),
            (Target::Amalgam(g), TargetElem::Amalgam(a)) => TargetElem::Amalgam(g.pow(a, k)),
            (Target::Malcev(g), TargetElem::Malcev(a)) => {
                TargetElem::Malcev(g.pow(a, &crate::malcev::Rat::from_integer(k.clone())))
            }
            _ => panic!("element of another group"),
        }
    }

    pub fn fmt_elem(&self, x: &TargetElem) -> String {
        match (self, x) {
            (Target::Pc(g), TargetElem::Pc(a)) => g.fmt_elem(a),
            (Target::Amalgam(g), TargetElem::Amalgam(a)) => g.fmt_elem(a),
            (Target::Malcev(g), TargetElem::Malcev(a)) => g.fmt_elem(a),
            _ => "<foreign element>".into(),
        }
    }

    /// Evaluate a word over [`Target::gen_names`].
    pub fn eval(&self, w: &Word) -> TargetElem {
        match self {
            Target::Pc(g) => TargetElem::Pc(g.collect(w)),
            Target::Amalgam(g) => TargetElem::Amalgam(g.normal_form(w)),
            Target::Malcev(_) => {
                let mut acc = self.identity();
                for s in w.syllables() {
                    acc = self.mul(&acc, &self.pow(&self.generator(s.gen), &s.exp));
                }
                acc
            }
        }
    }

    pub fn parse(&self, text: &str) -> Result<TargetElem> {
        if let Target::Malcev(m) = self {
            if let Ok(x) = m.parse_elem(text) {
                return Ok(TargetElem::Malcev(x));
            }
        }
        let w = crate::word::parse_word(text, &self.gen_names())?;
        Ok(self.eval(&w))
    }

    /// Word over the generator names, for serialization (not available for
    /// non-lattice elements of a completion).
    pub fn to_word(&self, x: &TargetElem) -> Option<Word> {
        match (self, x) {
            (Target::Pc(g), TargetElem::Pc(a)) => Some(g.to_word(a)),
            (Target::Amalgam(g), TargetElem::Amalgam(a)) => Some(g.to_word(a)),
            (Target::Malcev(m), TargetElem::Malcev(a)) => m.to_pc(a).map(|p| m.lattice().to_word(&p)),
            _ => None,
        }
    }

    /// Derived length when the group is a pc group (always solvable).
    pub fn derived_length(&self) -> Option<usize> {
        match self {
            Target::Pc(g) => Some(crate::pc::derived_series(g).class()),
            Target::Malcev(m) => Some(crate::pc::derived_series(m.lattice()).class()),
            Target::Amalgam(_) => None,
        }
    }
}

/// A relation that a homomorphism must respect, expressed over the domain
/// generators.
#[derive(Debug, Clone)]
pub struct CheckedRelation {
    pub label: String,
    pub lhs: Word,
    pub rhs: Word,
}

/// Defining relations of a domain: pc relations, or for an amalgam the
/// relations of every factor plus the identification of the core.
pub fn domain_relations(t: &Target) -> Vec<CheckedRelation> {
    match t {
        Target::Pc(g) => pc_relations(g, 0),
        Target::Amalgam(a) => {
            let mut out = Vec::new();
            for (f, fac) in a.factors().iter().enumerate() {
                out.extend(pc_relations(fac, a.letter(f, 0)));
            }
            for c in a.core().generators() {
                let w0 = a.factor_word(0, &a.embedding(0).apply(&c));
                for f in 1..a.factors().len() {
                    let wf = a.factor_word(f, &a.embedding(f).apply(&c));
                    out.push(CheckedRelation {
                        label: format!(
                            "{} = {}",
                            w0.display(a.letters()),
                            wf.display(a.letters())
                        ),
                        lhs: w0.clone(),
                        rhs: wf,
                    });
                }
            }
            out
        }
        Target::Malcev(m) => pc_relations(m.lattice(), 0),
    }
}

fn pc_relations(g: &PcGroup, offset: usize) -> Vec<CheckedRelation> {
    let shift = |w: Word| w.relabel(|k| k + offset);
    g.defining_relations()
        .into_iter()
        .map(|r| {
            let label = g.describe_relation(&r);
            match r {
                DefiningRelation::Conjugate { j, i, value } => CheckedRelation {
                    label,
                    lhs: shift(Word::gen(j).conjugate(&Word::gen(i))),
                    rhs: shift(g.to_word(&value)),
                },
                DefiningRelation::Power { i, order, value } => CheckedRelation {
                    label,
                    lhs: shift(Word::gen(i).pow(&order)),
                    rhs: shift(g.to_word(&value)),
                },
            }
        })
        .collect()
}

/// Homomorphism given by images of the domain generators (amalgam letters
/// for an amalgam domain), verified against every defining relation.
#[derive(Debug, Clone)]
pub struct GroupHom {
    domain: Target,
    codomain: Target,
    images: Vec<TargetElem>,
}

impl GroupHom {
    pub fn new(domain: Target, codomain: Target, images: Vec<TargetElem>) -> Result<GroupHom> {
        let h = GroupHom::new_unchecked(domain, codomain, images)?;
        h.verify()?;
        Ok(h)
    }

    pub fn new_unchecked(domain: Target, codomain: Target, images: Vec<TargetElem>) -> Result<GroupHom> {
        if images.len() != domain.gen_names().len() {
            return Err(Error::Invalid(format!(
                "{} images given for {} generators",
                images.len(),
                domain.gen_names().len()
            )));
        }
        Ok(GroupHom { domain, codomain, images })
    }

    /// Extend per-factor homomorphisms (images of each factor's generators)
    /// over an amalgam; they must agree on the core.
    pub fn extend(amalgam: &Arc<Amalgam>, codomain: Target, per_factor: Vec<Vec<TargetElem>>) -> Result<GroupHom> {
        if per_factor.len() != amalgam.factors().len() {
            return Err(Error::Invalid("one map per factor is required".into()));
        }
        // agreement on the core, reported by core generator
        for (k, c) in amalgam.core().generators().iter().enumerate() {
            let first = eval_pc(&codomain, &per_factor[0], &amalgam.embedding(0).apply(c));
            for f in 1..per_factor.len() {
                let other = eval_pc(&codomain, &per_factor[f], &amalgam.embedding(f).apply(c));
                if first != other {
                    let name = amalgam.factor(0).fmt_elem(&amalgam.embedding(0).apply(c));
                    return Err(Error::Disagreement(format!(
                        "core generator {} ({}): {} vs {}",
                        k + 1,
                        name,
                        codomain.fmt_elem(&first),
                        codomain.fmt_elem(&other)
                    )));
                }
            }
        }
        let images = per_factor.into_iter().flatten().collect();
        GroupHom::new(Target::Amalgam(amalgam.clone()), codomain, images)
    }

    pub fn from_pc_hom(h: &crate::pc::PcHom) -> GroupHom {
        GroupHom {
            domain: Target::Pc(h.domain().clone()),
            codomain: Target::Pc(h.codomain().clone()),
            images: h.images().iter().cloned().map(TargetElem::Pc).collect(),
        }
    }

    pub fn domain(&self) -> &Target {
        &self.domain
    }

    pub fn codomain(&self) -> &Target {
        &self.codomain
    }

    pub fn images(&self) -> &[TargetElem] {
        &self.images
    }

    pub fn verify(&self) -> Result<()> {
        for r in domain_relations(&self.domain) {
            let l = self.apply_word(&r.lhs);
            let rr = self.apply_word(&r.rhs);
            if l != rr {
                return Err(Error::RelationFails {
                    relation: r.label,
                    image: format!("{} vs {}", self.codomain.fmt_elem(&l), self.codomain.fmt_elem(&rr)),
                });
            }
        }
        Ok(())
    }

    /// Number of relations checked by [`GroupHom::verify`].
    pub fn relation_count(&self) -> usize {
        domain_relations(&self.domain).len()
    }

    pub fn apply_word(&self, w: &Word) -> TargetElem {
        let mut acc = self.codomain.identity();
        for s in w.syllables() {
            acc = self.codomain.mul(&acc, &self.codomain.pow(&self.images[s.gen], &s.exp));
        }
        acc
    }

    pub fn apply(&self, x: &TargetElem) -> Result<TargetElem> {
        match (&self.domain, x) {
            (Target::Pc(_), TargetElem::Pc(p)) => Ok(eval_pc(&self.codomain, &self.images, p)),
            (Target::Amalgam(a), TargetElem::Amalgam(e)) => Ok(self.apply_word(&a.to_word(e))),
            (Target::Malcev(_), _) => Err(Error::Unsupported("maps out of a completion".into())),
            _ => Err(Error::GroupMismatch),
        }
    }

    /// Images of the generators of factor `f` of an amalgam domain.
    pub fn factor_images(&self, f: usize) -> Option<&[TargetElem]> {
        let Target::Amalgam(a) = &self.domain else { return None };
        let start = a.letter(f, 0);
        Some(&self.images[start..start + a.factor(f).len()])
    }

    pub fn compose(&self, after: &GroupHom) -> Result<GroupHom> {
        let images = self.images.iter().map(|x| after.apply(x)).collect::<Result<Vec<_>>>()?;
        Ok(GroupHom { domain: self.domain.clone(), codomain: after.codomain.clone(), images })
    }

    /// Generator -> image word pairs (log coordinates for completion images
    /// that leave the lattice).
    pub fn describe(&self) -> Vec<(String, String)> {
        self.domain
            .gen_names()
            .into_iter()
            .zip(&self.images)
            .map(|(g, x)| (g, self.image_text(x)))
            .collect()
    }

    fn image_text(&self, x: &TargetElem) -> String {
        match (&self.codomain, x) {
            (Target::Malcev(m), TargetElem::Malcev(e)) => m.fmt_elem(e),
            _ => match self.codomain.to_word(x) {
                Some(w) => w.display(&self.codomain.gen_names()).to_string(),
                None => self.codomain.fmt_elem(x),
            },
        }
    }
}

/// Image of a pc element under generator images.
pub fn eval_pc(codomain: &Target, images: &[TargetElem], x: &PcElement) -> TargetElem {
    let mut acc = codomain.identity();
    for (i, e) in x.exponents().iter().enumerate() {
        if !e.is_zero() {
            acc = codomain.mul(&acc, &codomain.pow(&images[i], e));
        }
    }
    acc
}

/// Injectivity of a map out of a pc group into a pc group or completion,
/// certified by rank.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct InjectivityCertificate {
    pub subject: String,
    pub hirsch_length: usize,
    pub image_rank: usize,
    pub kernel_trivial: bool,
}

impl InjectivityCertificate {
    pub fn holds(&self) -> bool {
        self.kernel_trivial && self.hirsch_length == self.image_rank
    }
}

/// Certificate that the composite `domain -> codomain` is injective, where
/// `images` are the images of the domain generators.
pub fn injectivity(subject: &str, domain: &Arc<PcGroup>, codomain: &Target, images: &[TargetElem]) -> InjectivityCertificate {
    let h = domain.hirsch_length();
    match codomain {
        Target::Pc(c) => {
            let imgs: Vec<PcElement> = images.iter().map(|x| x.as_pc().expect("pc image").clone()).collect();
            let hom = crate::pc::PcHom::new_unchecked(domain, c, imgs);
            let ker = hom.kernel();
            InjectivityCertificate {
                subject: subject.to_string(),
                hirsch_length: h,
                image_rank: hom.image().hirsch_length(),
                kernel_trivial: ker.is_trivial(),
            }
        }
        Target::Malcev(_) => {
            // the image of X_i = log g_i is the log of the image of g_i, so
            // this is the rank of the induced Lie algebra map
            let rows: Vec<Vec<crate::malcev::Rat>> = images
                .iter()
                .map(|x| match x {
                    TargetElem::Malcev(e) => e.0.clone(),
                    _ => vec![],
                })
                .collect();
            let rank = rational_rank(&rows);
            InjectivityCertificate {
                subject: subject.to_string(),
                hirsch_length: h,
                image_rank: rank,
                kernel_trivial: rank == h && domain.is_torsion_free_presentation(),
            }
        }
        Target::Amalgam(_) => InjectivityCertificate {
            subject: subject.to_string(),
            hirsch_length: h,
            image_rank: 0,
            kernel_trivial: false,
        },
    }
}

fn rational_rank(rows: &[Vec<crate::malcev::Rat>]) -> usize {
    use crate::malcev::Rat;
    let mut a: Vec<Vec<Rat>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                let pr = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Injectivity of `h` on every factor of an amalgam domain (the kernel then
/// meets no conjugate of a factor and is free).
pub fn kernel_misses_factors(h: &GroupHom) -> Result<Vec<InjectivityCertificate>> {
    let Target::Amalgam(a) = h.domain() else {
        return Err(Error::Precondition("domain is not an amalgam".into()));
    };
    Ok((0..a.factors().len())
        .map(|f| injectivity(a.factor(f).name(), a.factor(f), h.codomain(), h.factor_images(f).unwrap()))
        .collect())
}

/// Injectivity of `h` on the amalgamated subgroup.
pub fn kernel_misses_amalgam(h: &GroupHom) -> Result<InjectivityCertificate> {
    let Target::Amalgam(a) = h.domain() else {
        return Err(Error::Precondition("domain is not an amalgam".into()));
    };
    let core = a.core();
    let images: Vec<TargetElem> = core
        .generators()
        .iter()
        .map(|c| eval_pc(h.codomain(), h.factor_images(0).unwrap(), &a.embedding(0).apply(c)))
        .collect();
    Ok(injectivity("C", core, h.codomain(), &images))
}

/// Whether all elements of a pc subgroup map to the identity.
pub fn kills_subgroup(codomain: &Target, images: &[TargetElem], s: &PcSubgroup) -> bool {
    s.generators().iter().all(|x| codomain.is_identity(&eval_pc(codomain, images, x)))
}
