//! Generalized free products of polycyclic factors amalgamating a common
//! subgroup, with reduced normal forms.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::pc::{direct_product, subgroup_as_group, PcElement, PcGroup, PcHom, PcSubgroup};
use crate::word::{parse_word, Word};

/// `{A_1 * ... * A_k ; C}` with one injective embedding of the abstract
/// group `C` into each factor.
#[derive(Debug, Clone)]
pub struct Amalgam {
    name: String,
    factors: Vec<Arc<PcGroup>>,
    core: Arc<PcGroup>,
    embeddings: Vec<PcHom>,
    images: Vec<PcSubgroup>,
    letters: Vec<String>,
    offsets: Vec<usize>,
    double: Option<DoubleData>,
}

/// Provenance of an amalgam built as a double: every factor is a renamed
/// copy of `base` and every embedding is the inclusion of `subgroup`.
#[derive(Debug, Clone)]
pub struct DoubleData {
    pub base: Arc<PcGroup>,
    pub subgroup: PcSubgroup,
}

/// `head * r_1 * ... * r_k` with `head` in the core and each `r_j` a
/// nontrivial canonical right coset representative of the core image in its
/// factor; adjacent factors differ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AmalgamElement {
    pub head: PcElement,
    pub tail: Vec<(usize, PcElement)>,
}

impl AmalgamElement {
    pub fn syllable_length(&self) -> usize {
        self.tail.len()
    }
}

impl Amalgam {
    /// Build from explicit embeddings of an abstract core group.
    pub fn new(name: &str, factors: Vec<Arc<PcGroup>>, core: Arc<PcGroup>, embeddings: Vec<PcHom>) -> Result<Amalgam> {
        if factors.is_empty() {
            return Err(Error::Invalid("an amalgam needs at least one factor".into()));
        }
        if embeddings.len() != factors.len() {
            return Err(Error::Invalid("one embedding per factor is required".into()));
        }
        let mut images = Vec::new();
        for (k, (f, e)) in factors.iter().zip(&embeddings).enumerate() {
            if !Arc::ptr_eq(e.domain(), &core) || !Arc::ptr_eq(e.codomain(), f) {
                return Err(Error::GroupMismatch);
            }
            e.verify()?;
            let ker = e.kernel();
            if !ker.is_trivial() {
                return Err(Error::NotInjective(format!(
                    "embedding into factor {} ({}) kills {}",
                    k + 1,
                    f.name(),
                    core.fmt_elem(&ker.generators()[0])
                )));
            }
            images.push(e.image());
        }
        let mut letters = Vec::new();
        let mut offsets = Vec::new();
        let mut seen = HashSet::new();
        for f in &factors {
            offsets.push(letters.len());
            for g in f.gens() {
                if !seen.insert(g.clone()) {
                    return Err(Error::DuplicateGenerator(g.clone()));
                }
                letters.push(g.clone());
            }
        }
        Ok(Amalgam { name: name.to_string(), factors, core, embeddings, images, letters, offsets, double: None })
    }

    /// Two-factor amalgam identifying `gp(u_k)` in `a` with `gp(v_k)` in `b`
    /// via `u_k -> v_k`.
    pub fn from_identification(
        name: &str,
        a: Arc<PcGroup>,
        b: Arc<PcGroup>,
        pairs: &[(PcElement, PcElement)],
    ) -> Result<Amalgam> {
        let ca = PcSubgroup::new(&a, &pairs.iter().map(|p| p.0.clone()).collect::<Vec<_>>());
        let (core, incl_a) = subgroup_as_group(&ca, "C");
        // graph of the identification inside A x B
        let prod = direct_product(&[&a, &b]);
        let graph_gens: Vec<PcElement> = pairs.iter().map(|(x, y)| prod.pair(x, y)).collect();
        let graph = PcSubgroup::new(&prod.group, &graph_gens);
        let na = a.len();
        if let Some(bad) = graph.generators().iter().find(|x| x.leader().is_some_and(|l| l >= na)) {
            return Err(Error::NotIsomorphic(format!(
                "the identification forces {} = 1",
                b.fmt_elem(&prod.component(bad, 1))
            )));
        }
        let mut images_b = Vec::new();
        for s in incl_a.images() {
            let (_, rem) = graph.sift(&prod.pair(s, &b.identity()));
            debug_assert!(rem.0[..na].iter().all(Zero::is_zero));
            images_b.push(b.inverse(&prod.component(&rem, 1)));
        }
        let incl_b = PcHom::new(&core, &b, images_b)?;
        Amalgam::new(name, vec![a, b], core, vec![incl_a, incl_b])
    }

    /// Word-pair form of [`Amalgam::from_identification`].
    pub fn from_identification_words(
        name: &str,
        a: Arc<PcGroup>,
        b: Arc<PcGroup>,
        pairs: &[(&str, &str)],
    ) -> Result<Amalgam> {
        let p = pairs.iter().map(|(x, y)| Ok((a.parse(x)?, b.parse(y)?))).collect::<Result<Vec<_>>>()?;
        Amalgam::from_identification(name, a, b, &p)
    }

    /// `copies` copies of `base` amalgamated along `subgroup`. The first copy
    /// keeps the generator names, copy `k >= 2` uses `{gen}_{k}`.
    pub fn double(name: &str, base: &Arc<PcGroup>, subgroup: &PcSubgroup, copies: usize) -> Result<Amalgam> {
        if copies < 2 {
            return Err(Error::Invalid("a double needs at least two copies".into()));
        }
        if !Arc::ptr_eq(subgroup.group(), base) {
            return Err(Error::GroupMismatch);
        }
        let (core, incl) = subgroup_as_group(subgroup, "C");
        let mut factors = Vec::new();
        let mut embeddings = Vec::new();
        for k in 0..copies {
            let f = if k == 0 {
                base.clone()
            } else {
                let mut rel = base.relations();
                rel.gens = rel.gens.iter().map(|g| format!("{g}_{}", k + 1)).collect();
                rel.name = format!("{}_{}", base.name(), k + 1);
                Arc::new(PcGroup::from_relations(rel, None)?)
            };
            let imgs: Vec<PcElement> = incl.images().iter().map(|x| PcElement(x.0.clone())).collect();
            embeddings.push(PcHom::new(&core, &f, imgs)?);
            factors.push(f);
        }
        let mut g = Amalgam::new(name, factors, core, embeddings)?;
        g.double = Some(DoubleData { base: base.clone(), subgroup: subgroup.clone() });
        Ok(g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn factors(&self) -> &[Arc<PcGroup>] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &Arc<PcGroup> {
        &self.factors[i]
    }

    pub fn core(&self) -> &Arc<PcGroup> {
        &self.core
    }

    pub fn embeddings(&self) -> &[PcHom] {
        &self.embeddings
    }

    pub fn embedding(&self, i: usize) -> &PcHom {
        &self.embeddings[i]
    }

    /// Image of the core in factor `i`.
    pub fn core_image(&self, i: usize) -> &PcSubgroup {
        &self.images[i]
    }

    pub fn double_data(&self) -> Option<&DoubleData> {
        self.double.as_ref()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    /// Global letter index of generator `g` of factor `i`.
    pub fn letter(&self, i: usize, g: usize) -> usize {
        self.offsets[i] + g
    }

    /// `(factor, generator)` of a global letter.
    pub fn letter_owner(&self, letter: usize) -> (usize, usize) {
        let f = self.offsets.iter().rposition(|&o| o <= letter).expect("letter index");
        (f, letter - self.offsets[f])
    }

    /// Factor index owning a letter name.
    pub fn factor_of_letter(&self, name: &str) -> Option<usize> {
        self.letters.iter().position(|l| l == name).map(|k| self.letter_owner(k).0)
    }

    pub fn identity(&self) -> AmalgamElement {
        AmalgamElement { head: self.core.identity(), tail: Vec::new() }
    }

    pub fn is_identity(&self, x: &AmalgamElement) -> bool {
        x.tail.is_empty() && x.head.is_identity()
    }

    pub fn from_core(&self, c: PcElement) -> AmalgamElement {
        AmalgamElement { head: c, tail: Vec::new() }
    }

    /// Element of factor `i` as an amalgam element.
    pub fn from_factor(&self, i: usize, x: &PcElement) -> AmalgamElement {
        self.left_mul_factor(i, x, &self.identity())
    }

    /// `g * y` for `g` in factor `f`.
    pub fn left_mul_factor(&self, f: usize, g: &PcElement, y: &AmalgamElement) -> AmalgamElement {
        let fac = &self.factors[f];
        let mut x = fac.mul(g, &self.embeddings[f].apply(&y.head));
        let mut rest = &y.tail[..];
        if let Some((f0, r0)) = rest.first() {
            if *f0 == f {
                x = fac.mul(&x, r0);
                rest = &rest[1..];
            }
        }
        let r = self.images[f].coset_rep(&x);
        let c = fac.mul(&x, &fac.inverse(&r));
        let head = self.embeddings[f].preimage_of(&c).expect("coset decomposition lands in the core");
        let mut tail = Vec::with_capacity(rest.len() + 1);
        if !r.is_identity() {
            tail.push((f, r));
        }
        tail.extend(rest.iter().cloned());
        AmalgamElement { head, tail }
    }

    pub fn mul(&self, x: &AmalgamElement, y: &AmalgamElement) -> AmalgamElement {
        let mut acc = y.clone();
        for (f, r) in x.tail.iter().rev() {
            acc = self.left_mul_factor(*f, r, &acc);
        }
        acc.head = self.core.mul(&x.head, &acc.head);
        acc
    }

    pub fn inverse(&self, x: &AmalgamElement) -> AmalgamElement {
        let mut acc = self.from_core(self.core.inverse(&x.head));
        for (f, r) in &x.tail {
            acc = self.left_mul_factor(*f, &self.factors[*f].inverse(r), &acc);
        }
        acc
    }

    pub fn pow(&self, x: &AmalgamElement, k: &BigInt) -> AmalgamElement {
        use num_traits::Signed;
        let base = if k.is_negative() { self.inverse(x) } else { x.clone() };
        let mut n = k.abs();
        let mut acc = self.identity();
        let mut sq = base;
        let two = BigInt::from(2);
        while !n.is_zero() {
            if (&n % &two) == BigInt::from(1) {
                acc = self.mul(&acc, &sq);
            }
            n /= &two;
            if !n.is_zero() {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    pub fn comm(&self, x: &AmalgamElement, y: &AmalgamElement) -> AmalgamElement {
        let xy = self.mul(x, y);
        let yx = self.mul(y, x);
        self.mul(&self.inverse(&yx), &xy)
    }

    pub fn conj(&self, x: &AmalgamElement, y: &AmalgamElement) -> AmalgamElement {
        self.mul(&self.mul(&self.inverse(y), x), y)
    }

    /// Normal form of a word over the letters.
    pub fn normal_form(&self, w: &Word) -> AmalgamElement {
        let mut acc = self.identity();
        for s in w.syllables().iter().rev() {
            let (f, g) = self.letter_owner(s.gen);
            let x = self.factors[f].pow(&self.factors[f].generator(g), &s.exp);
            acc = self.left_mul_factor(f, &x, &acc);
        }
        acc
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        parse_word(text, &self.letters)
    }

    pub fn parse(&self, text: &str) -> Result<AmalgamElement> {
        Ok(self.normal_form(&self.parse_word(text)?))
    }

    pub fn is_trivial(&self, w: &Word) -> bool {
        self.is_identity(&self.normal_form(w))
    }

    pub fn equal(&self, u: &Word, v: &Word) -> bool {
        self.is_trivial(&u.mul(&v.inverse()))
    }

    /// Word over the letters representing a factor element.
    pub fn factor_word(&self, f: usize, x: &PcElement) -> Word {
        self.factors[f].to_word(x).relabel(|g| self.offsets[f] + g)
    }

    /// Word over the letters representing `x`, with the head written in the
    /// first factor.
    pub fn to_word(&self, x: &AmalgamElement) -> Word {
        let mut w = self.factor_word(0, &self.embeddings[0].apply(&x.head));
        for (f, r) in &x.tail {
            w = w.mul(&self.factor_word(*f, r));
        }
        w
    }

    /// `C(...) * A(...) * ...` breakdown; the head is written in the first
    /// factor's generators. The identity prints as `1`.
    pub fn fmt_elem(&self, x: &AmalgamElement) -> String {
        if self.is_identity(x) {
            return "1".into();
        }
        let mut parts = Vec::new();
        if !x.head.is_identity() {
            parts.push(format!("C({})", self.factors[0].fmt_elem(&self.embeddings[0].apply(&x.head))));
        }
        for (f, r) in &x.tail {
            parts.push(format!("{}({})", self.factors[*f].name(), self.factors[*f].fmt_elem(r)));
        }
        parts.join(" * ")
    }

    /// Core images as subgroups, described by their induced sequences.
    pub fn describe(&self) -> String {
        let facs: Vec<String> = self.factors.iter().map(|f| f.name().to_string()).collect();
        let cs: Vec<String> = self.images.iter().map(PcSubgroup::describe).collect();
        format!("{{{} ; {}}}", facs.join(" * "), cs.join(" = "))
    }

    /// The same amalgam with factors listed in a different order.
    pub fn permuted(&self, order: &[usize]) -> Result<Amalgam> {
        let factors = order.iter().map(|&i| self.factors[i].clone()).collect();
        let embeddings = order.iter().map(|&i| self.embeddings[i].clone()).collect();
        Amalgam::new(&self.name, factors, self.core.clone(), embeddings)
    }
}

impl fmt::Display for Amalgam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.name, self.describe())
    }
}
