use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::group::{PcElement, PcGroup, PcRelations};
use super::hom::PcHom;
use super::subgroup::PcSubgroup;

/// Direct product with the factors' generators concatenated in order.
#[derive(Debug, Clone)]
pub struct DirectProduct {
    pub group: Arc<PcGroup>,
    pub offsets: Vec<usize>,
    pub lens: Vec<usize>,
}

impl DirectProduct {
    pub fn embed(&self, k: usize, x: &PcElement) -> PcElement {
        let mut v = vec![BigInt::zero(); self.group.len()];
        v[self.offsets[k]..self.offsets[k] + self.lens[k]].clone_from_slice(&x.0);
        PcElement(v)
    }

    pub fn pair(&self, a: &PcElement, b: &PcElement) -> PcElement {
        let mut v = a.0.clone();
        v.extend(b.0.iter().cloned());
        PcElement(v)
    }

    pub fn component(&self, x: &PcElement, k: usize) -> PcElement {
        PcElement(x.0[self.offsets[k]..self.offsets[k] + self.lens[k]].to_vec())
    }

    pub fn tuple(&self, parts: &[PcElement]) -> PcElement {
        PcElement(parts.iter().flat_map(|p| p.0.iter().cloned()).collect())
    }
}

/// Direct product of the given groups. Clashing generator names get a
/// `_k` suffix (k = 1-based factor position).
pub fn direct_product(factors: &[&Arc<PcGroup>]) -> DirectProduct {
    let mut seen: HashSet<&str> = HashSet::new();
    let mut clash: HashSet<&str> = HashSet::new();
    for f in factors {
        for g in f.gens() {
            if !seen.insert(g) {
                clash.insert(g);
            }
        }
    }
    let mut used: HashSet<String> = seen.iter().filter(|g| !clash.contains(*g)).map(|g| g.to_string()).collect();
    let mut gens = Vec::new();
    let mut orders = Vec::new();
    let mut conj = BTreeMap::new();
    let mut powers = BTreeMap::new();
    let mut offsets = Vec::new();
    let mut lens = Vec::new();
    let total: usize = factors.iter().map(|f| f.len()).sum();
    let widen = |off: usize, v: &[BigInt]| {
        let mut w = vec![BigInt::zero(); total];
        w[off..off + v.len()].clone_from_slice(v);
        w
    };
    let mut off = 0;
    for (k, f) in factors.iter().enumerate() {
        for g in f.gens() {
            if clash.contains(g.as_str()) {
                let mut nm = format!("{g}_{}", k + 1);
                while used.contains(&nm) {
                    nm.push('_');
                }
                used.insert(nm.clone());
                gens.push(nm);
            } else {
                gens.push(g.clone());
            }
        }
        orders.extend(f.relative_orders().iter().cloned());
        let rel = f.relations();
        for ((j, i), v) in rel.conj {
            conj.insert((j + off, i + off), widen(off, &v));
        }
        for (i, v) in rel.powers {
            powers.insert(i + off, widen(off, &v));
        }
        offsets.push(off);
        lens.push(f.len());
        off += f.len();
    }
    let names: Vec<&str> = factors.iter().map(|f| f.name()).collect();
    let rel = PcRelations { name: names.join("x"), gens, orders, conj, powers };
    let group = Arc::new(PcGroup::from_relations_unchecked(rel).expect("product of consistent groups"));
    DirectProduct { group, offsets, lens }
}

/// Quotient `G/N` by a normal subgroup, presented on the layers that survive.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub group: Arc<PcGroup>,
    pub normal: PcSubgroup,
    /// layers of `G` that carry the quotient generators
    pub kept: Vec<usize>,
    pub projection: PcHom,
}

impl Quotient {
    pub fn new(normal: &PcSubgroup, name: &str) -> crate::Result<Quotient> {
        if let Some(c) = normal.normality_violation() {
            return Err(crate::Error::NotNormal(normal.group().fmt_elem(&c)));
        }
        Ok(Self::new_unchecked(normal, name))
    }

    pub(crate) fn new_unchecked(normal: &PcSubgroup, name: &str) -> Quotient {
        let g = normal.group().clone();
        let leaders = normal.leaders();
        let gens_n = normal.generators();
        let lead_exp = |l: usize| -> Option<BigInt> {
            leaders.iter().position(|&m| m == l).map(|k| gens_n[k].0[l].clone())
        };
        let mut kept = Vec::new();
        let mut orders = Vec::new();
        for l in 0..g.len() {
            match lead_exp(l) {
                Some(f) if f.is_one() => {}
                Some(f) => {
                    kept.push(l);
                    orders.push(Some(f));
                }
                None => {
                    kept.push(l);
                    orders.push(g.relative_order(l).cloned());
                }
            }
        }
        let project = |x: &PcElement| -> Vec<BigInt> {
            let r = normal.coset_rep(x);
            kept.iter().map(|&l| r.0[l].clone()).collect()
        };
        let mut conj = BTreeMap::new();
        let mut powers = BTreeMap::new();
        for (b, &lb) in kept.iter().enumerate() {
            for (a, &la) in kept.iter().enumerate().take(b) {
                let v = project(g.conjugate_relation(lb, la));
                conj.insert((b, a), v);
            }
            if let Some(r) = &orders[b] {
                let p = g.pow(&g.generator(lb), r);
                powers.insert(b, project(&p));
            }
        }
        let gens: Vec<String> = kept.iter().map(|&l| g.gens()[l].clone()).collect();
        let rel = PcRelations { name: name.to_string(), gens, orders, conj, powers };
        let q = Arc::new(PcGroup::from_relations_unchecked(rel).expect("quotient of a consistent group"));
        let images = (0..g.len()).map(|l| PcElement(project(&g.generator(l)))).collect();
        let projection = PcHom::new_unchecked(&g, &q, images);
        Quotient { group: q, normal: normal.clone(), kept, projection }
    }

    pub fn project(&self, x: &PcElement) -> PcElement {
        let r = self.normal.coset_rep(x);
        PcElement(self.kept.iter().map(|&l| r.0[l].clone()).collect())
    }

    /// Canonical lift of a quotient element.
    pub fn lift(&self, y: &PcElement) -> PcElement {
        let g = self.normal.group();
        let mut v = vec![BigInt::zero(); g.len()];
        for (k, &l) in self.kept.iter().enumerate() {
            v[l] = y.0[k].clone();
        }
        // kept layers with no normal-subgroup leader are already reduced
        g.element(&v).expect("length")
    }
}

/// The subgroup as a group in its own right, with the inclusion map.
pub fn subgroup_as_group(h: &PcSubgroup, name: &str) -> (Arc<PcGroup>, PcHom) {
    let g = h.group().clone();
    let seq = h.generators();
    let leaders = h.leaders();
    let mut used: HashSet<String> = HashSet::new();
    let mut gens = Vec::new();
    for (k, s) in seq.iter().enumerate() {
        let l = leaders[k];
        let mut nm = if *s == g.generator(l) { g.gens()[l].clone() } else { format!("s{}", k + 1) };
        while used.contains(&nm) {
            nm.push('_');
        }
        used.insert(nm.clone());
        gens.push(nm);
    }
    let orders: Vec<Option<BigInt>> = leaders.iter().map(|&l| h.relative_order_at(l)).collect();
    let mut conj = BTreeMap::new();
    let mut powers = BTreeMap::new();
    for b in 0..seq.len() {
        for a in 0..b {
            let c = g.conj(&seq[b], &seq[a]);
            conj.insert((b, a), h.coordinates(&c).expect("subgroup closed"));
        }
        if let Some(r) = &orders[b] {
            powers.insert(b, h.coordinates(&g.pow(&seq[b], r)).expect("subgroup closed"));
        }
    }
    let rel = PcRelations { name: name.to_string(), gens, orders, conj, powers };
    let sg = Arc::new(PcGroup::from_relations_unchecked(rel).expect("subgroup of a consistent group"));
    let incl = PcHom::new_unchecked(&sg, &g, seq);
    (sg, incl)
}
