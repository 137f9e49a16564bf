use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::word::{Expr, Presentation, Word};

/// Normal-form element `g1^e1 * ... * gn^en` of a [`PcGroup`]. Exponents on
/// layers of finite relative order lie in `[0, r)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PcElement(pub(crate) Vec<BigInt>);

impl PcElement {
    pub fn exponents(&self) -> &[BigInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero exponent.
    pub fn leader(&self) -> Option<usize> {
        self.0.iter().position(|e| !e.is_zero())
    }

    pub fn into_exponents(self) -> Vec<BigInt> {
        self.0
    }
}

/// A finitely generated nilpotent group given by a consistent polycyclic
/// presentation.
///
/// For `i < j` the presentation stores the normal form of `g_j^{g_i}`, which
/// always has the shape `g_j * t` with `t` in the generators of index `> j`.
/// A generator of finite relative order `r` also stores `g_i^r` as an element
/// of the generators of index `> i`.
#[derive(Debug, Clone)]
pub struct PcGroup {
    name: String,
    gens: Vec<String>,
    orders: Vec<Option<BigInt>>,
    conj: Vec<Vec<PcElement>>,
    conj_inv: Vec<Vec<PcElement>>,
    powers: Vec<Option<PcElement>>,
    trivial_action: Vec<bool>,
    class: usize,
}

/// Relation data in exponent-vector form, for groups built by other
/// constructions (quotients, products, subgroups).
#[derive(Debug, Clone)]
pub struct PcRelations {
    pub name: String,
    pub gens: Vec<String>,
    pub orders: Vec<Option<BigInt>>,
    /// `(j, i) -> g_j^{g_i}` for `i < j`; missing pairs commute.
    pub conj: BTreeMap<(usize, usize), Vec<BigInt>>,
    /// `i -> g_i^{r_i}`; missing entries are trivial.
    pub powers: BTreeMap<usize, Vec<BigInt>>,
}

enum Tail {
    Word(Word, String),
    Elem(Vec<BigInt>),
}

impl PcGroup {
    /// Build from a textual presentation whose relations are of the forms
    /// `[x,y] = w`, `x^y = w` (with `x` after `y`), `x^n = w`, or bare relators of
    /// those shapes. Unmentioned pairs commute; unmentioned generators have
    /// infinite relative order.
    pub fn from_presentation(p: &Presentation) -> Result<PcGroup> {
        let n = p.gens.len();
        let mut orders: Vec<Option<BigInt>> = vec![None; n];
        let mut conj: BTreeMap<(usize, usize), Tail> = BTreeMap::new();
        let mut powers: BTreeMap<usize, Tail> = BTreeMap::new();
        for rel in &p.relations {
            let rhs = rel.rhs.as_ref().map(Expr::eval).unwrap_or_default();
            let bad = || Error::NotPcRelation(rel.text.clone());
            match &rel.lhs {
                Expr::Commutator(x, y) => {
                    let (Expr::Gen(x), Expr::Gen(y)) = (x.as_ref(), y.as_ref()) else { return Err(bad()) };
                    let (x, y) = (*x, *y);
                    if x == y {
                        return Err(bad());
                    }
                    // store [g_j, g_i] as a tail
                    let (key, tail) = if x > y { ((x, y), rhs) } else { ((y, x), rhs.inverse()) };
                    if conj.insert(key, Tail::Word(tail, rel.text.clone())).is_some() {
                        return Err(Error::NotPcRelation(format!("{} (pair defined twice)", rel.text)));
                    }
                }
                Expr::Conjugate(x, y) => {
                    let (Expr::Gen(x), Expr::Gen(y)) = (x.as_ref(), y.as_ref()) else { return Err(bad()) };
                    let (x, y) = (*x, *y);
                    if x <= y {
                        return Err(Error::NotPcRelation(format!(
                            "{} (conjugate the later generator by the earlier one)",
                            rel.text
                        )));
                    }
                    let tail = Word::gen(x).inverse().mul(&rhs);
                    if conj.insert((x, y), Tail::Word(tail, rel.text.clone())).is_some() {
                        return Err(Error::NotPcRelation(format!("{} (pair defined twice)", rel.text)));
                    }
                }
                Expr::Power(x, k) => {
                    let Expr::Gen(x) = x.as_ref() else { return Err(bad()) };
                    if *k < BigInt::from(2) {
                        return Err(Error::NotPcRelation(format!("{} (relative order must be >= 2)", rel.text)));
                    }
                    if orders[*x].is_some() {
                        return Err(Error::NotPcRelation(format!("{} (power defined twice)", rel.text)));
                    }
                    orders[*x] = Some(k.clone());
                    powers.insert(*x, Tail::Word(rhs, rel.text.clone()));
                }
                _ => return Err(bad()),
            }
        }
        Self::assemble(p.name.clone(), p.gens.clone(), orders, conj, powers, p.class, true)
    }

    /// Build from exponent-vector relation data and run the overlap tests.
    pub fn from_relations(rel: PcRelations, declared_class: Option<usize>) -> Result<PcGroup> {
        Self::build_relations(rel, declared_class, true)
    }

    /// For constructions whose consistency follows from the inputs (products,
    /// quotients and subgroups of consistent groups).
    pub(crate) fn from_relations_unchecked(rel: PcRelations) -> Result<PcGroup> {
        Self::build_relations(rel, None, false)
    }

    fn build_relations(rel: PcRelations, declared_class: Option<usize>, check: bool) -> Result<PcGroup> {
        let conj = rel.conj.into_iter().map(|(k, v)| (k, Tail::Elem(v))).collect();
        let powers = rel.powers.into_iter().map(|(k, v)| (k, Tail::Elem(v))).collect();
        Self::assemble(rel.name, rel.gens, rel.orders, conj, powers, declared_class, check)
    }

    fn assemble(
        name: String,
        gens: Vec<String>,
        orders: Vec<Option<BigInt>>,
        mut conj_tails: BTreeMap<(usize, usize), Tail>,
        mut power_tails: BTreeMap<usize, Tail>,
        declared_class: Option<usize>,
        check: bool,
    ) -> Result<PcGroup> {
        crate::word::check_distinct(&gens)?;
        let n = gens.len();
        for o in orders.iter().flatten() {
            if *o < BigInt::from(2) {
                return Err(Error::Invalid(format!("relative order {o} must be at least 2")));
            }
        }
        let unit = |j: usize| {
            let mut v = vec![BigInt::zero(); n];
            v[j] = BigInt::one();
            PcElement(v)
        };
        let mut g = PcGroup {
            name,
            gens,
            orders,
            conj: (0..n).map(|j| (0..j).map(|_| unit(j)).collect()).collect(),
            conj_inv: (0..n).map(|j| (0..j).map(|_| unit(j)).collect()).collect(),
            powers: vec![None; n],
            trivial_action: vec![true; n],
            class: 0,
        };
        for i in (0..n).rev() {
            // relations with lower index i are normalized inside <g_{i+1}, ..., g_n>
            for j in i + 1..n {
                let Some(tail) = conj_tails.remove(&(j, i)) else { continue };
                let elem = match tail {
                    Tail::Word(w, text) => {
                        let t = g.collect_in_tail(&w, i, &text)?;
                        if t.0[..=j].iter().any(|e| !e.is_zero()) {
                            return Err(Error::TailOutOfRange { relation: text, index: j + 1 });
                        }
                        g.mul(&unit(j), &t)
                    }
                    Tail::Elem(v) => {
                        let text = format!("{}^{} = {}", g.gens[j], g.gens[i], g.fmt_exps(&v));
                        if v.len() != n
                            || v[..j].iter().any(|e| !e.is_zero())
                            || !v[j].is_one()
                        {
                            return Err(Error::TailOutOfRange { relation: text, index: j + 1 });
                        }
                        PcElement(v)
                    }
                };
                g.conj[j][i] = elem;
            }
            if let Some(tail) = power_tails.remove(&i) {
                let elem = match tail {
                    Tail::Word(w, text) => g.collect_in_tail(&w, i, &text)?,
                    Tail::Elem(v) => {
                        if v.len() != n || v[..=i].iter().any(|e| !e.is_zero()) {
                            let text = format!("{}^r = {}", g.gens[i], g.fmt_exps(&v));
                            return Err(Error::TailOutOfRange { relation: text, index: i + 1 });
                        }
                        PcElement(v)
                    }
                };
                if g.orders[i].is_none() {
                    return Err(Error::Invalid(format!("power relation for infinite generator {}", g.gens[i])));
                }
                g.powers[i] = Some(elem);
            } else if g.orders[i].is_some() {
                g.powers[i] = Some(g.identity());
            }
            g.trivial_action[i] = (i + 1..n).all(|j| g.conj[j][i] == unit(j));
            // g_j^{g_i^-1} = g_j * sigma^{-1}(t)^{-1}, computed from the top down
            for j in (i + 1..n).rev() {
                let t = g.mul(&g.inverse(&unit(j)), &g.conj[j][i]);
                let mut pre = g.identity();
                for k in j + 1..n {
                    if !t.0[k].is_zero() {
                        let p = g.pow(&g.conj_inv[k][i], &t.0[k]);
                        pre = g.mul(&pre, &p);
                    }
                }
                let inv = g.mul(&unit(j), &g.inverse(&pre));
                g.conj_inv[j][i] = inv;
            }
        }
        if let Some(((j, i), _)) = conj_tails.into_iter().next() {
            return Err(Error::NotPcRelation(format!("relation for pair ({}, {}) out of range", j, i)));
        }
        if check {
            g.check_consistency()?;
        }
        g.class = super::series::lower_central_series(&std::sync::Arc::new(g.clone())).class();
        if let Some(c) = declared_class {
            if c != g.class {
                return Err(Error::ClassMismatch { declared: c, actual: g.class });
            }
        }
        Ok(g)
    }

    fn collect_in_tail(&self, w: &Word, i: usize, text: &str) -> Result<PcElement> {
        if w.syllables().iter().any(|s| s.gen <= i) {
            return Err(Error::TailOutOfRange { relation: text.to_string(), index: i + 1 });
        }
        Ok(self.collect(w))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn gens(&self) -> &[String] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn relative_orders(&self) -> &[Option<BigInt>] {
        &self.orders
    }

    pub fn relative_order(&self, i: usize) -> Option<&BigInt> {
        self.orders[i].as_ref()
    }

    /// Nilpotency class (length of the lower central series).
    pub fn class(&self) -> usize {
        self.class
    }

    pub fn is_torsion_free_presentation(&self) -> bool {
        self.orders.iter().all(Option::is_none)
    }

    /// Number of layers of infinite relative order.
    pub fn hirsch_length(&self) -> usize {
        self.orders.iter().filter(|o| o.is_none()).count()
    }

    /// `g_j^{g_i}` for `i < j`.
    pub fn conjugate_relation(&self, j: usize, i: usize) -> &PcElement {
        &self.conj[j][i]
    }

    /// `g_i^{r_i}` for a finite relative order.
    pub fn power_relation(&self, i: usize) -> Option<&PcElement> {
        self.powers[i].as_ref()
    }

    pub fn is_abelian(&self) -> bool {
        self.trivial_action.iter().all(|&t| t)
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g == name)
    }

    pub fn identity(&self) -> PcElement {
        PcElement(vec![BigInt::zero(); self.len()])
    }

    pub fn generator(&self, i: usize) -> PcElement {
        let mut v = vec![BigInt::zero(); self.len()];
        v[i] = BigInt::one();
        PcElement(v)
    }

    pub fn generators(&self) -> Vec<PcElement> {
        (0..self.len()).map(|i| self.generator(i)).collect()
    }

    /// Element with the given exponents, reduced into normal form.
    pub fn element(&self, exps: &[BigInt]) -> Result<PcElement> {
        if exps.len() != self.len() {
            return Err(Error::GroupMismatch);
        }
        let mut x = self.identity();
        for (i, e) in exps.iter().enumerate() {
            self.mul_gen_pow(&mut x.0, i, e);
        }
        Ok(x)
    }

    pub fn element_i64(&self, exps: &[i64]) -> PcElement {
        let v: Vec<BigInt> = exps.iter().map(|&e| BigInt::from(e)).collect();
        self.element(&v).expect("exponent vector length")
    }

    pub fn contains(&self, x: &PcElement) -> bool {
        x.len() == self.len()
            && x.0.iter().zip(&self.orders).all(|(e, o)| match o {
                Some(r) => !e.is_negative() && e < r,
                None => true,
            })
    }

    /// Collect a word over this group's generators into normal form.
    pub fn collect(&self, w: &Word) -> PcElement {
        let mut x = self.identity();
        for s in w.syllables() {
            self.mul_gen_pow(&mut x.0, s.gen, &s.exp);
        }
        x
    }

    pub fn parse(&self, text: &str) -> Result<PcElement> {
        Ok(self.collect(&crate::word::parse_word(text, &self.gens)?))
    }

    pub fn mul(&self, x: &PcElement, y: &PcElement) -> PcElement {
        assert!(x.len() == self.len() && y.len() == self.len(), "element of another group");
        let mut r = x.0.clone();
        for (j, e) in y.0.iter().enumerate() {
            self.mul_gen_pow(&mut r, j, e);
        }
        PcElement(r)
    }

    pub fn checked_mul(&self, x: &PcElement, y: &PcElement) -> Result<PcElement> {
        if !self.contains(x) || !self.contains(y) {
            return Err(Error::GroupMismatch);
        }
        Ok(self.mul(x, y))
    }

    pub fn inverse(&self, x: &PcElement) -> PcElement {
        let mut r = vec![BigInt::zero(); self.len()];
        for j in (0..self.len()).rev() {
            if !x.0[j].is_zero() {
                self.mul_gen_pow(&mut r, j, &-&x.0[j]);
            }
        }
        PcElement(r)
    }

    pub fn pow(&self, x: &PcElement, k: &BigInt) -> PcElement {
        if k.is_zero() || x.is_identity() {
            return self.identity();
        }
        if let Some(l) = x.leader() {
            if x.0[l + 1..].iter().all(Zero::is_zero) {
                let mut r = vec![BigInt::zero(); self.len()];
                self.mul_gen_pow(&mut r, l, &(&x.0[l] * k));
                return PcElement(r);
            }
        }
        let base = if k.is_negative() { self.inverse(x) } else { x.clone() };
        let mut n = k.abs();
        let mut acc = self.identity();
        let mut sq = base;
        while !n.is_zero() {
            if n.is_odd() {
                acc = self.mul(&acc, &sq);
            }
            n >>= 1;
            if !n.is_zero() {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    pub fn pow_i64(&self, x: &PcElement, k: i64) -> PcElement {
        self.pow(x, &BigInt::from(k))
    }

    /// `[x, y] = x^-1 y^-1 x y`
    pub fn comm(&self, x: &PcElement, y: &PcElement) -> PcElement {
        let xy = self.mul(x, y);
        let yx = self.mul(y, x);
        self.mul(&self.inverse(&yx), &xy)
    }

    /// `x^y = y^-1 x y`
    pub fn conj(&self, x: &PcElement, y: &PcElement) -> PcElement {
        self.mul(&self.mul(&self.inverse(y), x), y)
    }

    /// x := x * g_i^k
    pub(crate) fn mul_gen_pow(&self, x: &mut [BigInt], i: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        let n = self.len();
        let has_tail = x[i + 1..].iter().any(|e| !e.is_zero());
        let finite = self.orders[i].is_some();
        if !has_tail && !finite {
            x[i] += k;
            return;
        }
        let mut tail = vec![BigInt::zero(); n];
        for j in i + 1..n {
            std::mem::swap(&mut tail[j], &mut x[j]);
        }
        let mut tail = PcElement(tail);
        if has_tail && !self.trivial_action[i] {
            tail = self.conj_by_gen_pow(tail, i, k);
        }
        x[i] += k;
        if let Some(r) = &self.orders[i] {
            let (q, s) = x[i].div_mod_floor(r);
            x[i] = s;
            if !q.is_zero() {
                let w = self.powers[i].as_ref().expect("power relation");
                let wq = self.pow(w, &q);
                tail = self.mul(&wq, &tail);
            }
        }
        for j in i + 1..n {
            std::mem::swap(&mut x[j], &mut tail.0[j]);
        }
    }

    /// Apply conjugation by `g_i^k` to an element of `<g_{i+1}, ..., g_n>`.
    fn conj_by_gen_pow(&self, t: PcElement, i: usize, k: &BigInt) -> PcElement {
        let table = if k.is_negative() { &self.conj_inv } else { &self.conj };
        let reps = k.abs();
        if reps <= BigInt::from(8) {
            let mut t = t;
            let mut c = BigInt::zero();
            while c < reps {
                t = self.apply_images(&t, i, |j| &table[j][i]);
                c += 1;
            }
            return t;
        }
        // square-and-multiply on the automorphism, stored as generator images
        let n = self.len();
        let mut base: Vec<PcElement> = (0..n)
            .map(|j| if j > i { table[j][i].clone() } else { self.identity() })
            .collect();
        let mut acc: Option<Vec<PcElement>> = None;
        let mut e = reps;
        while !e.is_zero() {
            if e.is_odd() {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => (0..n)
                        .map(|j| if j > i { self.apply_images(&a[j], i, |l| &base[l]) } else { self.identity() })
                        .collect(),
                });
            }
            e >>= 1;
            if !e.is_zero() {
                base = (0..n)
                    .map(|j| if j > i { self.apply_images(&base[j], i, |l| &base[l]) } else { self.identity() })
                    .collect();
            }
        }
        let acc = acc.expect("positive exponent");
        self.apply_images(&t, i, |j| &acc[j])
    }

    fn apply_images<'a>(&self, t: &PcElement, i: usize, img: impl Fn(usize) -> &'a PcElement) -> PcElement {
        let mut r = self.identity();
        for j in i + 1..self.len() {
            if !t.0[j].is_zero() {
                let p = self.pow(img(j), &t.0[j]);
                r = self.mul(&r, &p);
            }
        }
        r
    }

    /// Exhaustive overlap tests. Returns the first failing overlap.
    pub fn check_consistency(&self) -> Result<()> {
        let n = self.len();
        let g = |i: usize| self.generator(i);
        let fail = |overlap: String, a: &PcElement, b: &PcElement| Error::Inconsistent {
            overlap,
            lhs: self.fmt_elem(a),
            rhs: self.fmt_elem(b),
        };
        let name = |i: usize| self.gens[i].as_str();
        for k in 0..n {
            for j in 0..k {
                for i in 0..j {
                    let lhs = self.mul(&self.mul(&g(k), &g(j)), &g(i));
                    let rhs = self.mul(&g(k), &self.mul(&g(j), &g(i)));
                    if lhs != rhs {
                        let o = format!("({}*{})*{} vs {}*({}*{})", name(k), name(j), name(i), name(k), name(j), name(i));
                        return Err(fail(o, &lhs, &rhs));
                    }
                }
            }
        }
        for j in 0..n {
            for i in 0..j {
                if let Some(r) = &self.orders[j] {
                    let lhs = self.mul(self.powers[j].as_ref().unwrap(), &g(i));
                    let rhs = self.mul(&self.pow(&g(j), &(r - 1u32)), &self.mul(&g(j), &g(i)));
                    if lhs != rhs {
                        let o = format!("({}^{})*{} vs {}^{}*({}*{})", name(j), r, name(i), name(j), r - 1u32, name(j), name(i));
                        return Err(fail(o, &lhs, &rhs));
                    }
                }
                if let Some(r) = &self.orders[i] {
                    let lhs = self.mul(&g(j), self.powers[i].as_ref().unwrap());
                    let rhs = self.mul(&self.mul(&g(j), &g(i)), &self.pow(&g(i), &(r - 1u32)));
                    if lhs != rhs {
                        let o = format!("{}*({}^{}) vs ({}*{})*{}^{}", name(j), name(i), r, name(j), name(i), name(i), r - 1u32);
                        return Err(fail(o, &lhs, &rhs));
                    }
                } else {
                    let gi_inv = self.inverse(&g(i));
                    let lhs = self.mul(&self.mul(&g(j), &gi_inv), &g(i));
                    if lhs != g(j) {
                        let o = format!("({}*{}^-1)*{} vs {}", name(j), name(i), name(i), name(j));
                        return Err(fail(o, &lhs, &g(j)));
                    }
                }
                if self.orders[j].is_none() {
                    let gj_inv = self.inverse(&g(j));
                    let lhs = self.mul(&gj_inv, &self.mul(&g(j), &g(i)));
                    if lhs != g(i) {
                        let o = format!("{}^-1*({}*{}) vs {}", name(j), name(j), name(i), name(i));
                        return Err(fail(o, &lhs, &g(i)));
                    }
                }
            }
        }
        for i in 0..n {
            if self.orders[i].is_some() {
                let w = self.powers[i].as_ref().unwrap();
                let lhs = self.mul(&g(i), w);
                let rhs = self.mul(w, &g(i));
                if lhs != rhs {
                    let o = format!("{}*({}^r) vs ({}^r)*{}", name(i), name(i), name(i), name(i));
                    return Err(fail(o, &lhs, &rhs));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn fmt_exps(&self, v: &[BigInt]) -> String {
        let parts: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(|(i, e)| format!("{}^{}", self.gens.get(i).map(String::as_str).unwrap_or("?"), e))
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Normal form with explicit exponents, e.g. `a^1*b^1*c^1`; identity is `1`.
    pub fn fmt_elem(&self, x: &PcElement) -> String {
        self.fmt_exps(&x.0)
    }

    /// Normal form as a word (for re-parsing).
    pub fn to_word(&self, x: &PcElement) -> Word {
        crate::word::free_reduce(x.0.iter().enumerate().map(|(i, e)| (i, e.clone())))
    }

    /// Relations in the textual grammar, round-trippable through
    /// [`PcGroup::from_presentation`].
    pub fn relation_strings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for j in 0..self.len() {
            for i in 0..j {
                let t = self.mul(&self.inverse(&self.generator(j)), &self.conj[j][i]);
                if !t.is_identity() {
                    out.push(format!("[{},{}] = {}", self.gens[j], self.gens[i], self.to_word(&t).display(&self.gens)));
                }
            }
        }
        for i in 0..self.len() {
            if let (Some(r), Some(w)) = (&self.orders[i], &self.powers[i]) {
                out.push(format!("{}^{} = {}", self.gens[i], r, self.to_word(w).display(&self.gens)));
            }
        }
        out
    }

    pub fn to_presentation(&self) -> Presentation {
        let rels: Vec<String> = self.relation_strings();
        let refs: Vec<&str> = rels.iter().map(String::as_str).collect();
        Presentation::new(&self.name, self.gens.clone(), &refs, Some(self.class)).expect("own relations parse")
    }

    /// Relation data in exponent form (all pairs and powers).
    pub fn relations(&self) -> PcRelations {
        let mut conj = BTreeMap::new();
        for j in 0..self.len() {
            for i in 0..j {
                if self.conj[j][i] != self.generator(j) {
                    conj.insert((j, i), self.conj[j][i].0.clone());
                }
            }
        }
        let powers = (0..self.len()).filter_map(|i| self.powers[i].as_ref().map(|w| (i, w.0.clone()))).collect();
        PcRelations { name: self.name.clone(), gens: self.gens.clone(), orders: self.orders.clone(), conj, powers }
    }

    /// Defining relations as (label, lhs, rhs) over the generators, used by
    /// homomorphism checks.
    pub fn defining_relations(&self) -> Vec<DefiningRelation> {
        let mut out = Vec::new();
        for j in 0..self.len() {
            for i in 0..j {
                out.push(DefiningRelation::Conjugate { j, i, value: self.conj[j][i].clone() });
            }
        }
        for i in 0..self.len() {
            if let (Some(r), Some(w)) = (&self.orders[i], &self.powers[i]) {
                out.push(DefiningRelation::Power { i, order: r.clone(), value: w.clone() });
            }
        }
        out
    }

    pub fn describe_relation(&self, r: &DefiningRelation) -> String {
        match r {
            DefiningRelation::Conjugate { j, i, value } => {
                format!("{}^{} = {}", self.gens[*j], self.gens[*i], self.fmt_elem(value))
            }
            DefiningRelation::Power { i, order, value } => format!("{}^{} = {}", self.gens[*i], order, self.fmt_elem(value)),
        }
    }
}

#[derive(Debug, Clone)]
pub enum DefiningRelation {
    /// `g_j^{g_i} = value`
    Conjugate { j: usize, i: usize, value: PcElement },
    /// `g_i^order = value`
    Power { i: usize, order: BigInt, value: PcElement },
}

impl fmt::Display for PcGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "group {} {{ gens: {}; rels: {}; class: {} }}", self.name, self.gens.join(", "), self.relation_strings().join(", "), self.class)
    }
}
