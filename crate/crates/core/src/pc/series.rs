use std::sync::Arc;

use super::group::{PcElement, PcGroup};
use super::hom::kernel_of_map;
use super::ops::Quotient;
use super::subgroup::{center, PcSubgroup};

/// A descending (or ascending, for the upper central series) chain of
/// normal subgroups.
#[derive(Debug, Clone)]
pub struct Series {
    pub terms: Vec<PcSubgroup>,
}

impl Series {
    /// Length until the last term, i.e. the nilpotency class for the lower
    /// central series and the derived length for the derived series.
    pub fn class(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    pub fn hirsch_lengths(&self) -> Vec<usize> {
        self.terms.iter().map(PcSubgroup::hirsch_length).collect()
    }
}

/// `gamma_1 = G`, `gamma_{k+1} = [gamma_k, G]`, ending with the trivial group.
pub fn lower_central_series(g: &Arc<PcGroup>) -> Series {
    let mut terms = vec![PcSubgroup::whole(g)];
    while !terms.last().unwrap().is_trivial() {
        let cur = terms.last().unwrap();
        let mut gens = Vec::new();
        for x in cur.generators() {
            for y in g.generators() {
                gens.push(g.comm(&x, &y));
            }
        }
        let next = PcSubgroup::normal_closure(g, &gens);
        if next == *cur {
            // not nilpotent; cannot happen for presentations with central series
            break;
        }
        terms.push(next);
    }
    Series { terms }
}

/// `delta_1 = G`, `delta_{k+1} = [delta_k, delta_k]`.
pub fn derived_series(g: &Arc<PcGroup>) -> Series {
    let mut terms = vec![PcSubgroup::whole(g)];
    while !terms.last().unwrap().is_trivial() {
        let cur = terms.last().unwrap();
        let seq = cur.generators();
        let mut gens = Vec::new();
        for (a, x) in seq.iter().enumerate() {
            for y in &seq[a + 1..] {
                gens.push(g.comm(y, x));
            }
        }
        let next = PcSubgroup::normal_closure(g, &gens);
        if next == *cur {
            break;
        }
        terms.push(next);
    }
    Series { terms }
}

pub fn derived_subgroup(g: &Arc<PcGroup>) -> PcSubgroup {
    let s = derived_series(g);
    s.terms.get(1).cloned().unwrap_or_else(|| PcSubgroup::trivial(g))
}

/// `zeta_0 = 1`, `zeta_{k+1}/zeta_k = Z(G/zeta_k)`, ending with `G`.
pub fn upper_central_series(g: &Arc<PcGroup>) -> Series {
    let mut terms = vec![PcSubgroup::trivial(g)];
    loop {
        let cur = terms.last().unwrap().clone();
        if cur.is_whole() {
            break;
        }
        let q = Quotient::new_unchecked(&cur, "Q");
        let z = center(&q.group);
        let next = q.projection.preimage(&z);
        if next == cur {
            break;
        }
        terms.push(next);
    }
    Series { terms }
}

/// `U ∩ N` for a normal subgroup `N`, as the kernel of `U -> G/N`.
pub fn intersect_normal(u: &PcSubgroup, n: &PcSubgroup) -> PcSubgroup {
    let q = Quotient::new_unchecked(n, "Q");
    let values: Vec<PcElement> = u.generators().iter().map(|x| q.project(x)).collect();
    kernel_of_map(u, &q.group, &values)
}
