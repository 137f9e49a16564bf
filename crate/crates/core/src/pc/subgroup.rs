use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::group::{PcElement, PcGroup};
use crate::error::{Error, Result};
use crate::zmatrix::ext_gcd;

/// Subgroup of a [`PcGroup`] stored as a canonical induced polycyclic
/// sequence: at most one element per leading index, leading exponent
/// positive (dividing the relative order on finite layers), and exponents at
/// the other leading indices reduced modulo their leading exponent.
#[derive(Debug, Clone)]
pub struct PcSubgroup {
    group: Arc<PcGroup>,
    table: Vec<Option<PcElement>>,
}

impl PartialEq for PcSubgroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.group, &other.group) && self.table == other.table
    }
}

impl Eq for PcSubgroup {}

impl PcSubgroup {
    pub fn new(group: &Arc<PcGroup>, gens: &[PcElement]) -> PcSubgroup {
        let mut s = PcSubgroup { group: group.clone(), table: vec![None; group.len()] };
        for g in gens {
            s.insert(g.clone());
        }
        s.close();
        s
    }

    pub fn whole(group: &Arc<PcGroup>) -> PcSubgroup {
        PcSubgroup { group: group.clone(), table: group.generators().into_iter().map(Some).collect() }
    }

    pub fn trivial(group: &Arc<PcGroup>) -> PcSubgroup {
        PcSubgroup { group: group.clone(), table: vec![None; group.len()] }
    }

    pub fn from_words(group: &Arc<PcGroup>, words: &[&str]) -> Result<PcSubgroup> {
        let gens = words.iter().map(|w| group.parse(w)).collect::<Result<Vec<_>>>()?;
        Ok(PcSubgroup::new(group, &gens))
    }

    pub fn group(&self) -> &Arc<PcGroup> {
        &self.group
    }

    /// Induced generating sequence, ordered by leading index.
    pub fn generators(&self) -> Vec<PcElement> {
        self.table.iter().flatten().cloned().collect()
    }

    pub fn leaders(&self) -> Vec<usize> {
        (0..self.table.len()).filter(|&i| self.table[i].is_some()).collect()
    }

    /// Relative order of the induced generator with leading index `l`
    /// (`None` = infinite).
    pub fn relative_order_at(&self, l: usize) -> Option<BigInt> {
        let s = self.table[l].as_ref()?;
        self.group.relative_order(l).map(|r| r / &s.0[l])
    }

    pub fn is_trivial(&self) -> bool {
        self.table.iter().all(Option::is_none)
    }

    pub fn is_whole(&self) -> bool {
        self.index() == Some(BigInt::one())
    }

    /// Number of infinite layers of the induced sequence.
    pub fn hirsch_length(&self) -> usize {
        (0..self.table.len())
            .filter(|&l| self.table[l].is_some() && self.group.relative_order(l).is_none())
            .count()
    }

    /// Index in the parent group, `None` when infinite.
    pub fn index(&self) -> Option<BigInt> {
        let mut idx = BigInt::one();
        for (l, e) in self.table.iter().enumerate() {
            match (e, self.group.relative_order(l)) {
                (None, None) => return None,
                (None, Some(r)) => idx *= r,
                (Some(s), _) => idx *= &s.0[l],
            }
        }
        Some(idx)
    }

    /// Order of the subgroup, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        let mut o = BigInt::one();
        for l in self.leaders() {
            o *= self.relative_order_at(l)?;
        }
        Some(o)
    }

    /// Left-sift `x` through the table: returns `(decomposition, remainder)`
    /// with `x = s_{l1}^{q1} * s_{l2}^{q2} * ... * remainder`.
    pub fn sift(&self, x: &PcElement) -> (Vec<(usize, BigInt)>, PcElement) {
        let g = &self.group;
        let mut x = x.clone();
        let mut dec = Vec::new();
        for l in 0..g.len() {
            if x.0[l].is_zero() {
                continue;
            }
            let Some(s) = &self.table[l] else { break };
            let (q, r) = x.0[l].div_mod_floor(&s.0[l]);
            if !r.is_zero() {
                break;
            }
            x = g.mul(&g.pow(s, &-&q), &x);
            dec.push((l, q));
        }
        (dec, x)
    }

    pub fn contains(&self, x: &PcElement) -> bool {
        self.sift(x).1.is_identity()
    }

    /// Exponents of `x` with respect to the induced sequence.
    pub fn coordinates(&self, x: &PcElement) -> Result<Vec<BigInt>> {
        let (dec, rem) = self.sift(x);
        if !rem.is_identity() {
            return Err(Error::Invalid(format!("{} is not in the subgroup", self.group.fmt_elem(x))));
        }
        let leaders = self.leaders();
        let mut out = vec![BigInt::zero(); leaders.len()];
        for (l, q) in dec {
            let k = leaders.iter().position(|&m| m == l).unwrap();
            out[k] = q;
        }
        Ok(out)
    }

    /// Canonical representative of the right coset `H x`.
    pub fn coset_rep(&self, x: &PcElement) -> PcElement {
        let g = &self.group;
        let mut x = x.clone();
        for l in 0..g.len() {
            if let Some(s) = &self.table[l] {
                let q = x.0[l].div_floor(&s.0[l]);
                if !q.is_zero() {
                    x = g.mul(&g.pow(s, &-q), &x);
                }
            }
        }
        x
    }

    pub fn is_subgroup_of(&self, other: &PcSubgroup) -> bool {
        self.generators().iter().all(|s| other.contains(s))
    }

    pub fn is_normal(&self) -> bool {
        self.normality_violation().is_none()
    }

    /// A conjugate of an induced generator that leaves the subgroup.
    pub fn normality_violation(&self) -> Option<PcElement> {
        let g = &self.group;
        for s in self.table.iter().flatten() {
            for x in g.generators() {
                for y in [x.clone(), g.inverse(&x)] {
                    let c = g.conj(s, &y);
                    if !self.contains(&c) {
                        return Some(c);
                    }
                }
            }
        }
        None
    }

    pub fn normal_closure(group: &Arc<PcGroup>, gens: &[PcElement]) -> PcSubgroup {
        let mut s = PcSubgroup::new(group, gens);
        while let Some(c) = s.normality_violation() {
            s.insert(c);
            s.close();
        }
        s
    }

    /// Subgroup generated by `self` and `other`.
    pub fn join(&self, other: &PcSubgroup) -> PcSubgroup {
        let mut gens = self.generators();
        gens.extend(other.generators());
        PcSubgroup::new(&self.group, &gens)
    }

    /// Insert with gcd merging; returns true if the table changed.
    fn insert(&mut self, x: PcElement) -> bool {
        let g = self.group.clone();
        let mut queue = vec![x];
        let mut changed = false;
        while let Some(mut x) = queue.pop() {
            while let Some(l) = x.leader() {
                let e = x.0[l].clone();
                match &self.table[l] {
                    None => {
                        let x = self.normalize_leader(x, l, &mut queue);
                        self.table[l] = Some(x);
                        changed = true;
                        break;
                    }
                    Some(s) => {
                        let f = s.0[l].clone();
                        if e.is_multiple_of(&f) {
                            x = g.mul(&g.pow(s, &-(&e / &f)), &x);
                            continue;
                        }
                        let (_, a, b) = ext_gcd(&e, &f);
                        let merged = g.mul(&g.pow(&x, &a), &g.pow(s, &b));
                        let old = self.table[l].take().unwrap();
                        queue.push(old);
                        queue.push(x);
                        x = merged;
                    }
                }
            }
        }
        changed
    }

    /// Make the leading exponent positive and, on a finite layer, a divisor
    /// of the relative order; the discarded power is queued.
    fn normalize_leader(&self, x: PcElement, l: usize, queue: &mut Vec<PcElement>) -> PcElement {
        let g = &self.group;
        match g.relative_order(l) {
            None => {
                if x.0[l].is_negative() {
                    g.inverse(&x)
                } else {
                    x
                }
            }
            Some(r) => {
                let e = x.0[l].clone();
                let (d, k, _) = ext_gcd(&e, r);
                let y = if d == e { x } else { g.pow(&x, &k) };
                debug_assert_eq!(y.0[l], d);
                // y^(r/d) has deeper leader
                queue.push(g.pow(&y, &(r / &d)));
                y
            }
        }
    }

    /// Close under commutators and relative powers, then canonicalize.
    fn close(&mut self) {
        let g = self.group.clone();
        loop {
            let mut changed = false;
            let gens: Vec<(usize, PcElement)> =
                (0..self.table.len()).filter_map(|l| self.table[l].clone().map(|s| (l, s))).collect();
            'outer: for (a, (la, sa)) in gens.iter().enumerate() {
                if let Some(r) = g.relative_order(*la) {
                    let p = g.pow(sa, &(r / &sa.0[*la]));
                    if !self.contains(&p) && self.insert(p) {
                        changed = true;
                        break 'outer;
                    }
                }
                for (_, sb) in gens.iter().skip(a + 1) {
                    let c = g.comm(sb, sa);
                    if !self.contains(&c) && self.insert(c) {
                        changed = true;
                        break 'outer;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        self.canonicalize();
    }

    fn canonicalize(&mut self) {
        let g = self.group.clone();
        let n = self.table.len();
        for l in 0..n {
            let Some(mut x) = self.table[l].clone() else { continue };
            for m in l + 1..n {
                if let Some(s) = &self.table[m] {
                    let q = x.0[m].div_floor(&s.0[m]);
                    if !q.is_zero() {
                        x = g.mul(&x, &g.pow(s, &-q));
                    }
                }
            }
            self.table[l] = Some(x);
        }
    }

    pub fn describe(&self) -> String {
        let gens: Vec<String> = self.generators().iter().map(|s| self.group.fmt_elem(s)).collect();
        format!("<{}>", gens.join(", "))
    }
}

/// Kernel of a homomorphism from `h` to a cyclic group (`Z` when `modulus`
/// is `None`, else `Z/modulus`) given by the values on the induced sequence.
pub fn kernel_to_cyclic(h: &PcSubgroup, values: &[BigInt], modulus: Option<&BigInt>) -> PcSubgroup {
    let g = h.group().clone();
    let seq = h.generators();
    assert_eq!(seq.len(), values.len());
    let m = seq.len();
    let norm = |v: &BigInt| match modulus {
        Some(r) => v.mod_floor(r),
        None => v.clone(),
    };
    let vals: Vec<BigInt> = values.iter().map(norm).collect();
    let mut kernel_gens: Vec<PcElement> = Vec::new();
    // gcd of the values below, with Bezout coefficients on those generators
    let mut below = BigInt::zero();
    let mut coeffs: Vec<BigInt> = vec![BigInt::zero(); m];
    for i in (0..m).rev() {
        let v = &vals[i];
        // span = alpha*below (mod modulus)
        let (span, alpha) = match modulus {
            Some(r) => {
                let (d, a, _) = ext_gcd(&below, r);
                (d, a)
            }
            None => (below.clone(), BigInt::one()),
        };
        let t = if v.is_zero() {
            Some(BigInt::one())
        } else if span.is_zero() {
            None
        } else {
            Some(&span / span.gcd(v))
        };
        if let Some(t) = t {
            // t*v = k*span = sum k*coeffs_j * v_j  (mod modulus)
            let target = &t * v;
            let mut y = g.identity();
            if !target.is_zero() {
                let k = target.div_floor(&span) * &alpha;
                for j in i + 1..m {
                    if !coeffs[j].is_zero() {
                        y = g.mul(&y, &g.pow(&seq[j], &(&k * &coeffs[j])));
                    }
                }
            }
            let kgen = g.mul(&g.pow(&seq[i], &t), &g.inverse(&y));
            kernel_gens.push(kgen);
        }
        // fold v into the running gcd
        let (d, a, b) = ext_gcd(&below, v);
        if d != below {
            for c in coeffs.iter_mut().skip(i + 1) {
                *c *= &a;
            }
            coeffs[i] = b;
            below = d;
        } else if below.is_zero() {
            coeffs[i] = BigInt::zero();
        }
    }
    PcSubgroup::new(&g, &kernel_gens)
}

/// Centralizer of `y` in the subgroup `h`, computed layer by layer along the
/// central series of the presentation.
pub fn centralizer(h: &PcSubgroup, y: &PcElement) -> PcSubgroup {
    let g = h.group().clone();
    let mut c = h.clone();
    for k in 0..g.len() {
        let seq = c.generators();
        let vals: Vec<BigInt> = seq.iter().map(|s| g.comm(y, s).0[k].clone()).collect();
        if vals.iter().all(Zero::is_zero) {
            continue;
        }
        c = kernel_to_cyclic(&c, &vals, g.relative_order(k));
    }
    c
}

pub fn center(group: &Arc<PcGroup>) -> PcSubgroup {
    let mut c = PcSubgroup::whole(group);
    for x in group.generators() {
        c = centralizer(&c, &x);
    }
    c
}
