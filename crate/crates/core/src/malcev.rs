//! Rational Mal'cev completions of torsion-free nilpotent groups of class at
//! most 2, in Lie-algebra (logarithm) coordinates.
//!
//! For class 2 the Baker-Campbell-Hausdorff series stops after one bracket:
//! `log(e^X e^Y) = X + Y + [X,Y]/2`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::pc::{PcElement, PcGroup, PcSubgroup};

pub type Rat = BigRational;

fn rat(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

/// Element of the completion, stored as log coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MalcevElement(pub Vec<Rat>);

#[derive(Debug, Clone)]
pub struct MalcevGroup {
    lattice: Arc<PcGroup>,
    /// `bracket[k][l]` = coordinates of `[X_k, X_l]`
    bracket: Vec<Vec<Vec<Rat>>>,
}

impl MalcevGroup {
    /// Completion of a torsion-free pc group of class at most 2.
    pub fn new(g: &Arc<PcGroup>) -> Result<MalcevGroup> {
        if !g.is_torsion_free_presentation() {
            return Err(Error::Unsupported(format!("{} has finite relative orders", g.name())));
        }
        if g.class() > 2 {
            return Err(Error::Unsupported(format!(
                "completion of {} needs class <= 2, it has class {}",
                g.name(),
                g.class()
            )));
        }
        let n = g.len();
        let mut m = MalcevGroup { lattice: g.clone(), bracket: vec![vec![vec![Rat::zero(); n]; n]; n] };
        // [g_j, g_i] lies in higher generators, whose brackets are already known
        for j in (0..n).rev() {
            for i in 0..j {
                let c = g.comm(&g.generator(j), &g.generator(i));
                let v = m.log(&c);
                m.bracket[i][j] = v.iter().map(|x| -x.clone()).collect();
                m.bracket[j][i] = v;
            }
        }
        // class 2: every bracket is central in the Lie algebra
        for k in 0..n {
            for l in 0..n {
                for q in 0..n {
                    if m.lie_bracket(&m.bracket[k][l], &m.basis(q)).iter().any(|x| !x.is_zero()) {
                        return Err(Error::Unsupported("Lie algebra is not of class 2".into()));
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn lattice(&self) -> &Arc<PcGroup> {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.len()
    }

    fn basis(&self, k: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.dim()];
        v[k] = Rat::one();
        v
    }

    pub fn lie_bracket(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let n = self.dim();
        let mut out = vec![Rat::zero(); n];
        for k in 0..n {
            if x[k].is_zero() {
                continue;
            }
            for l in 0..n {
                if y[l].is_zero() || k == l {
                    continue;
                }
                let s = &x[k] * &y[l];
                for (o, b) in out.iter_mut().zip(&self.bracket[k][l]) {
                    if !b.is_zero() {
                        *o += &s * b;
                    }
                }
            }
        }
        out
    }

    /// `log(g_1^{e_1} ... g_n^{e_n}) = sum e_k X_k + 1/2 sum_{k<l} e_k e_l [X_k, X_l]`
    pub fn log(&self, x: &PcElement) -> Vec<Rat> {
        self.log_of_exponents(&x.exponents().iter().map(rat).collect::<Vec<_>>())
    }

    fn log_of_exponents(&self, e: &[Rat]) -> Vec<Rat> {
        let n = self.dim();
        let mut out: Vec<Rat> = e.to_vec();
        let half = Rat::new(BigInt::one(), BigInt::from(2));
        for k in 0..n {
            for l in k + 1..n {
                if e[k].is_zero() || e[l].is_zero() {
                    continue;
                }
                let s = &half * &e[k] * &e[l];
                for (o, b) in out.iter_mut().zip(&self.bracket[k][l]) {
                    if !b.is_zero() {
                        *o += &s * b;
                    }
                }
            }
        }
        out
    }

    /// Element with second-kind coordinates `t`.
    pub fn from_second_kind(&self, t: &[Rat]) -> MalcevElement {
        MalcevElement(self.log_of_exponents(t))
    }

    /// Inverse of [`MalcevGroup::fmt_elem`]: `1` or `g^k` / `g^(p/q)` factors
    /// in generator order.
    pub fn parse_elem(&self, text: &str) -> Result<MalcevElement> {
        let text = text.trim();
        let mut t = vec![Rat::zero(); self.dim()];
        if text == "1" {
            return Ok(self.from_second_kind(&t));
        }
        let bad = |m: &str| Error::Parse { position: 0, message: format!("{m} in `{text}`") };
        let mut last = None;
        for part in text.split('*') {
            let (name, exp) = part.trim().split_once('^').unwrap_or((part.trim(), "1"));
            let k = self.lattice.gen_index(name).ok_or_else(|| Error::UndeclaredGenerator { name: name.to_string(), position: 0 })?;
            if last.is_some_and(|l| l >= k) {
                return Err(bad("coordinates out of order"));
            }
            last = Some(k);
            let exp = exp.trim().trim_start_matches('(').trim_end_matches(')');
            t[k] = exp.parse::<Rat>().map_err(|_| bad("bad exponent"))?;
        }
        Ok(self.from_second_kind(&t))
    }

    pub fn from_pc(&self, x: &PcElement) -> MalcevElement {
        MalcevElement(self.log(x))
    }

    /// Rational exponents `t` with `exp(X) = g_1^{t_1} ... g_n^{t_n}`.
    pub fn second_kind(&self, x: &MalcevElement) -> Vec<Rat> {
        let n = self.dim();
        let mut t: Vec<Rat> = vec![Rat::zero(); n];
        for i in 0..n {
            // bracket contributions to coordinate i only involve t_k, t_l with k, l < i
            let corr = self.log_of_exponents(&t)[i].clone();
            t[i] = &x.0[i] - corr;
        }
        t
    }

    /// The lattice element with log coordinates `x`, if `exp(x)` lies in it.
    pub fn to_pc(&self, x: &MalcevElement) -> Option<PcElement> {
        let t = self.second_kind(x);
        if t.iter().any(|v| !v.is_integer()) {
            return None;
        }
        let v: Vec<BigInt> = t.iter().map(|v| v.to_integer()).collect();
        self.lattice.element(&v).ok()
    }

    pub fn identity(&self) -> MalcevElement {
        MalcevElement(vec![Rat::zero(); self.dim()])
    }

    pub fn mul(&self, x: &MalcevElement, y: &MalcevElement) -> MalcevElement {
        let b = self.lie_bracket(&x.0, &y.0);
        let half = Rat::new(BigInt::one(), BigInt::from(2));
        MalcevElement(x.0.iter().zip(&y.0).zip(&b).map(|((a, c), d)| a + c + &half * d).collect())
    }

    pub fn inverse(&self, x: &MalcevElement) -> MalcevElement {
        MalcevElement(x.0.iter().map(|v| -v.clone()).collect())
    }

    /// `x^q` for rational `q` (roots are unique in the completion).
    pub fn pow(&self, x: &MalcevElement, q: &Rat) -> MalcevElement {
        MalcevElement(x.0.iter().map(|v| v * q).collect())
    }

    pub fn comm(&self, x: &MalcevElement, y: &MalcevElement) -> MalcevElement {
        MalcevElement(self.lie_bracket(&x.0, &y.0))
    }

    pub fn conj(&self, x: &MalcevElement, y: &MalcevElement) -> MalcevElement {
        self.mul(&self.mul(&self.inverse(y), x), y)
    }

    /// Second-kind coordinates, e.g. `p^(1/2)*r^1`; identity is `1`.
    pub fn fmt_elem(&self, x: &MalcevElement) -> String {
        let t = self.second_kind(x);
        let parts: Vec<String> = t
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| {
                let g = &self.lattice.gens()[i];
                if v.is_integer() {
                    format!("{g}^{v}")
                } else {
                    format!("{g}^({v})")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Linear extension `m(mu): m(A) -> m(B)` of a homomorphism `mu: C -> B`
/// defined on a finite-index subgroup `C` of `A`.
#[derive(Debug, Clone)]
pub struct CompletionExtension {
    pub source: Arc<MalcevGroup>,
    pub target: Arc<MalcevGroup>,
    /// row `i` = image of `X_i` in the target's log coordinates
    pub matrix: Vec<Vec<Rat>>,
    pub index: BigInt,
}

impl CompletionExtension {
    /// `c` is a finite-index subgroup of `A`; `images[k]` is the image in `B`
    /// of the `k`-th element of its induced sequence.
    pub fn new(
        source: &Arc<MalcevGroup>,
        target: &Arc<MalcevGroup>,
        c: &PcSubgroup,
        images: &[PcElement],
    ) -> Result<CompletionExtension> {
        let index = c.index().ok_or_else(|| Error::Precondition("subgroup has infinite index".into()))?;
        let seq = c.generators();
        let n = source.dim();
        if seq.len() != n || images.len() != n {
            return Err(Error::Precondition("subgroup has smaller Hirsch length".into()));
        }
        let p: Vec<Vec<Rat>> = seq.iter().map(|s| source.log(s)).collect();
        let q: Vec<Vec<Rat>> = images.iter().map(|y| target.log(y)).collect();
        let pinv = invert(&p).ok_or_else(|| Error::Precondition("logs of the subgroup do not span".into()))?;
        let matrix = mat_mul(&pinv, &q);
        let ext = CompletionExtension { source: source.clone(), target: target.clone(), matrix, index };
        ext.check_lie_hom()?;
        Ok(ext)
    }

    pub fn apply_log(&self, x: &[Rat]) -> Vec<Rat> {
        let m = self.target.dim();
        let mut out = vec![Rat::zero(); m];
        for (xi, row) in x.iter().zip(&self.matrix) {
            if xi.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(row) {
                *o += xi * r;
            }
        }
        out
    }

    pub fn apply(&self, x: &PcElement) -> MalcevElement {
        MalcevElement(self.apply_log(&self.source.log(x)))
    }

    fn check_lie_hom(&self) -> Result<()> {
        let n = self.source.dim();
        for k in 0..n {
            for l in k + 1..n {
                let lhs = self.apply_log(&self.source.bracket[k][l]);
                let rhs = self.target.lie_bracket(&self.matrix[k], &self.matrix[l]);
                if lhs != rhs {
                    return Err(Error::RelationFails {
                        relation: format!("[X_{}, X_{}]", self.source.lattice.gens()[k], self.source.lattice.gens()[l]),
                        image: "extension is not a Lie algebra homomorphism".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Rank of the linear map (injective iff equal to the source dimension).
    pub fn rank(&self) -> usize {
        rank(&self.matrix)
    }

    /// Least common multiple of the denominators of the second-kind
    /// coordinates of the images of the source generators.
    pub fn denominator_lcm(&self) -> BigInt {
        let mut l = BigInt::one();
        for g in self.source.lattice.generators() {
            for t in self.target.second_kind(&self.apply(&g)) {
                l = l.lcm(t.denom());
            }
        }
        l
    }
}

fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(Rat::zero(), |acc, (x, br)| acc + x * &br[j]))
                .collect()
        })
        .collect()
}

fn invert(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot_row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn rank(m: &[Vec<Rat>]) -> usize {
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
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
