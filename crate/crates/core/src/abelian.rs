//! Abelianizations of pc groups and amalgams as cokernels of integer
//! relation matrices.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::amalgam::Amalgam;
use crate::error::{Error, Result};
use crate::pc::{DefiningRelation, PcElement, PcGroup, PcSubgroup};
use crate::zmatrix::{cokernel, cokernel_map, AbelianGroup, Cokernel, IntMatrix};

#[derive(Debug, Clone)]
pub struct AbelianizationResult {
    pub group: AbelianGroup,
    /// generator name -> coordinates in the invariant-factor basis
    pub generator_images: Vec<(String, Vec<BigInt>)>,
    pub relation_matrix: IntMatrix,
    pub map: Cokernel,
}

impl AbelianizationResult {
    fn from_matrix(names: &[String], m: IntMatrix) -> AbelianizationResult {
        let map = cokernel_map(&m);
        let generator_images = names
            .iter()
            .enumerate()
            .map(|(k, g)| (g.clone(), map.image(&unit(names.len(), k))))
            .collect();
        AbelianizationResult { group: map.group.clone(), generator_images, relation_matrix: m, map }
    }

    /// Every relation row maps to zero.
    pub fn relations_die(&self) -> bool {
        (0..self.relation_matrix.rows()).all(|r| self.map.is_zero(self.relation_matrix.row(r)))
    }

    pub fn image(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.map.image(v)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AbelianReport {
    pub group: String,
    pub torsion_invariants: Vec<String>,
    pub free_rank: usize,
    pub generator_images: Vec<(String, Vec<String>)>,
}

impl From<&AbelianizationResult> for AbelianReport {
    fn from(r: &AbelianizationResult) -> Self {
        AbelianReport {
            group: r.group.to_string(),
            torsion_invariants: r.group.torsion_invariants.iter().map(ToString::to_string).collect(),
            free_rank: r.group.free_rank,
            generator_images: r
                .generator_images
                .iter()
                .map(|(g, v)| (g.clone(), v.iter().map(ToString::to_string).collect()))
                .collect(),
        }
    }
}

fn unit(n: usize, k: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    v[k] = BigInt::one();
    v
}

fn shifted(v: &[BigInt], offset: usize, total: usize) -> Vec<BigInt> {
    let mut w = vec![BigInt::zero(); total];
    w[offset..offset + v.len()].clone_from_slice(v);
    w
}

/// Rows of the pc relations read additively.
pub fn relation_rows(g: &PcGroup) -> Vec<Vec<BigInt>> {
    let mut rows = Vec::new();
    for r in g.defining_relations() {
        match r {
            DefiningRelation::Conjugate { j, value, .. } => {
                let mut row: Vec<BigInt> = value.exponents().to_vec();
                row[j] -= 1;
                if row.iter().any(|e| !e.is_zero()) {
                    rows.push(row);
                }
            }
            DefiningRelation::Power { i, order, value } => {
                let mut row: Vec<BigInt> = value.exponents().iter().map(|e| -e).collect();
                row[i] += &order;
                rows.push(row);
            }
        }
    }
    rows
}

fn matrix(cols: usize, rows: Vec<Vec<BigInt>>) -> IntMatrix {
    let mut m = IntMatrix::zeros(0, cols);
    for r in rows {
        m.push_row(&r);
    }
    m
}

pub fn abelianize_pc(g: &PcGroup) -> AbelianizationResult {
    AbelianizationResult::from_matrix(g.gens(), matrix(g.len(), relation_rows(g)))
}

/// Additive image of a factor element in the letter coordinates.
fn letter_vector(amalgam: &Amalgam, f: usize, x: &PcElement) -> Vec<BigInt> {
    shifted(x.exponents(), amalgam.letter(f, 0), amalgam.letters().len())
}

/// Factor relations plus `c(alpha_f) - c(alpha_{f+1})` for each core generator.
pub fn amalgam_relation_matrix(amalgam: &Amalgam) -> IntMatrix {
    let total = amalgam.letters().len();
    let mut rows = Vec::new();
    for (f, fac) in amalgam.factors().iter().enumerate() {
        for r in relation_rows(fac) {
            rows.push(shifted(&r, amalgam.letter(f, 0), total));
        }
    }
    for c in amalgam.core().generators() {
        for f in 0..amalgam.factors().len().saturating_sub(1) {
            let a = letter_vector(amalgam, f, &amalgam.embedding(f).apply(&c));
            let b = letter_vector(amalgam, f + 1, &amalgam.embedding(f + 1).apply(&c));
            rows.push(a.iter().zip(&b).map(|(x, y)| x - y).collect());
        }
    }
    matrix(total, rows)
}

pub fn abelianize_amalgam(amalgam: &Amalgam) -> AbelianizationResult {
    AbelianizationResult::from_matrix(amalgam.letters(), amalgam_relation_matrix(amalgam))
}

pub fn is_perfect(amalgam: &Amalgam) -> bool {
    abelianize_amalgam(amalgam).group.is_trivial()
}

pub fn abelianization_infinite(amalgam: &Amalgam) -> bool {
    abelianize_amalgam(amalgam).group.is_infinite()
}

/// `D = A_ab/gp(C_A) x B_ab/gp(C_B)` with the epimorphism from `G_ab`.
#[derive(Debug, Clone)]
pub struct QuotientD {
    pub d: AbelianGroup,
    /// the same group from one stacked presentation matrix
    pub d_presented: AbelianGroup,
    /// letter name -> coordinates in `D`
    pub theta: Vec<(String, Vec<BigInt>)>,
    pub relations_die: bool,
    pub surjective: bool,
}

impl QuotientD {
    pub fn holds(&self) -> bool {
        self.relations_die && self.surjective && self.d == self.d_presented
    }
}

fn factor_mod_core(amalgam: &Amalgam, f: usize) -> IntMatrix {
    let fac = amalgam.factor(f);
    let mut rows = relation_rows(fac);
    for c in amalgam.core().generators() {
        rows.push(amalgam.embedding(f).apply(&c).exponents().to_vec());
    }
    matrix(fac.len(), rows)
}

pub fn quotient_d(amalgam: &Amalgam) -> Result<QuotientD> {
    if amalgam.factors().len() != 2 {
        return Err(Error::Precondition("D is defined for two-factor amalgams".into()));
    }
    let total = amalgam.letters().len();
    let maps: Vec<Cokernel> = (0..2).map(|f| cokernel_map(&factor_mod_core(amalgam, f))).collect();
    let d = maps[0].group.direct_sum(&maps[1].group);
    // single presentation of D over all letters
    let mut stacked = IntMatrix::zeros(0, total);
    for f in 0..2 {
        let m = factor_mod_core(amalgam, f);
        for r in 0..m.rows() {
            stacked.push_row(&shifted(m.row(r), amalgam.letter(f, 0), total));
        }
    }
    let d_presented = cokernel(&stacked);
    // theta on letters: coordinates in the product of the two cokernels
    let n0 = amalgam.factor(0).len();
    let theta_vec = |v: &[BigInt]| -> Vec<BigInt> {
        let mut out = maps[0].image(&v[..n0]);
        out.extend(maps[1].image(&v[n0..]));
        out
    };
    let theta: Vec<(String, Vec<BigInt>)> = amalgam
        .letters()
        .iter()
        .enumerate()
        .map(|(k, g)| (g.clone(), theta_vec(&unit(total, k))))
        .collect();
    let moduli: Vec<BigInt> = maps[0].moduli().into_iter().chain(maps[1].moduli()).collect();
    let is_zero = |v: &[BigInt]| v.iter().zip(&moduli).all(|(x, m)| if m.is_zero() { x.is_zero() } else { (x % m).is_zero() });
    let rel = amalgam_relation_matrix(amalgam);
    let relations_die = (0..rel.rows()).all(|r| is_zero(&theta_vec(rel.row(r))));
    // images generate D iff Z^k / <images, torsion relations> is trivial
    let k = moduli.len();
    let mut gen_m = IntMatrix::zeros(0, k);
    for (_, v) in &theta {
        gen_m.push_row(v);
    }
    for (i, m) in moduli.iter().enumerate() {
        if !m.is_zero() {
            let mut row = vec![BigInt::zero(); k];
            row[i] = m.clone();
            gen_m.push_row(&row);
        }
    }
    let surjective = cokernel(&gen_m).is_trivial();
    Ok(QuotientD { d, d_presented, theta, relations_die, surjective })
}

/// "Proper" certified by a Hirsch-length drop or a finite index above one.
pub fn proper_certificate(c: &PcSubgroup) -> Option<String> {
    let g = c.group();
    if c.hirsch_length() < g.hirsch_length() {
        return Some(format!("Hirsch length {} < {}", c.hirsch_length(), g.hirsch_length()));
    }
    match c.index() {
        Some(i) if i > BigInt::one() => Some(format!("index {i}")),
        None => Some("infinite index".into()),
        _ => None,
    }
}

/// Nontriviality of `A / gp(C, [A,A])` for a proper subgroup `C`.
pub fn frattini_consequence_check(a: &Arc<PcGroup>, c: &PcSubgroup) -> Result<bool> {
    if proper_certificate(c).is_none() {
        return Err(Error::Precondition(format!("{} is not a proper subgroup of {}", c.describe(), a.name())));
    }
    Ok(!frattini_quotient(a, c).is_trivial())
}

/// `A / gp(C, [A,A])` as an abelian group.
pub fn frattini_quotient(a: &PcGroup, c: &PcSubgroup) -> AbelianGroup {
    let mut rows = relation_rows(a);
    rows.extend(c.generators().iter().map(|x| x.exponents().to_vec()));
    cokernel(&matrix(a.len(), rows))
}
