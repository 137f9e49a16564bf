//! Exact integer matrices: Hermite and Smith normal forms with unimodular
//! transforms, cokernels and finitely generated abelian groups.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix row {i}");
            for (j, x) in r.iter().enumerate() {
                m[(i, j)] = x.clone().into();
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let v: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        Self::from_rows(cols, &v)
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, d) in entries.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[BigInt]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += x * &self[(i, j)];
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    pub fn rank(&self) -> usize {
        let (h, _) = hermite_normal_form(self);
        (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count()
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs().is_one()
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    pub(crate) fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += k * col[src]
    pub(crate) fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `U` unimodular and
/// `U * M = H`. Pivots are positive, entries above a pivot lie in
/// `[0, pivot)`, zero rows come last.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut pivot_row = 0;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for col in 0..m.cols {
        if pivot_row == m.rows {
            break;
        }
        // Euclid down the column, always pivoting on the smallest entry.
        loop {
            let best = (pivot_row..m.rows)
                .filter(|&i| !h[(i, col)].is_zero())
                .min_by(|&a, &b| h[(a, col)].abs().cmp(&h[(b, col)].abs()).then(a.cmp(&b)));
            let Some(best) = best else { break };
            h.swap_rows(best, pivot_row);
            u.swap_rows(best, pivot_row);
            let mut done = true;
            for i in pivot_row + 1..m.rows {
                if h[(i, col)].is_zero() {
                    continue;
                }
                let q = h[(i, col)].div_floor(&h[(pivot_row, col)]);
                h.add_row(i, pivot_row, &-&q);
                u.add_row(i, pivot_row, &-&q);
                if !h[(i, col)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(pivot_row, col)].is_zero() {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        let p = h[(pivot_row, col)].clone();
        for i in 0..pivot_row {
            let q = h[(i, col)].div_floor(&p);
            h.add_row(i, pivot_row, &-&q);
            u.add_row(i, pivot_row, &-&q);
        }
        pivots.push((pivot_row, col));
        pivot_row += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(S, U, V)` with `U * M * V = S`, `U`, `V`
/// unimodular, `S` diagonal with non-negative entries `d1 | d2 | ...`.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);
    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block, row-major tie-break
            let mut best: Option<(usize, usize)> = None;
            for i in t..m.rows {
                for j in t..m.cols {
                    if s[(i, j)].is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if s[(bi, bj)].abs() <= s[(i, j)].abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            s.swap_rows(t, bi);
            u.swap_rows(t, bi);
            s.swap_cols(t, bj);
            v.swap_cols(t, bj);
            let p = s[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..m.rows {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = s[(i, t)].div_floor(&p);
                s.add_row(i, t, &-&q);
                u.add_row(i, t, &-&q);
                if !s[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..m.cols {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = s[(t, j)].div_floor(&p);
                s.add_col(j, t, &-&q);
                v.add_col(j, t, &-&q);
                if !s[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the whole trailing block
            let bad = (t + 1..m.rows)
                .flat_map(|i| (t + 1..m.cols).map(move |j| (i, j)))
                .find(|&(i, j)| !s[(i, j)].is_multiple_of(&p));
            match bad {
                Some((i, _)) => {
                    s.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    (s, u, v)
}

/// Diagonal of a (not necessarily square) matrix in Smith form.
pub fn smith_diagonal(s: &IntMatrix) -> Vec<BigInt> {
    (0..s.rows.min(s.cols)).map(|i| s[(i, i)].clone()).collect()
}

/// A finitely generated abelian group in invariant-factor form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub torsion_invariants: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { torsion_invariants: Vec::new(), free_rank: 0 }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { torsion_invariants: Vec::new(), free_rank: rank }
    }

    /// Normalize arbitrary diagonal entries into invariant-factor form.
    pub fn from_diagonal(diag: &[BigInt], extra_free: usize) -> Self {
        let m = IntMatrix::diagonal(diag);
        let (s, _, _) = smith_normal_form(&m);
        let d = smith_diagonal(&s);
        let mut torsion = Vec::new();
        let mut free = extra_free;
        for x in d {
            if x.is_zero() {
                free += 1;
            } else if !x.is_one() {
                torsion.push(x);
            }
        }
        AbelianGroup { torsion_invariants: torsion, free_rank: free }
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion_invariants.is_empty() && self.free_rank == 0
    }

    pub fn is_infinite(&self) -> bool {
        self.free_rank > 0
    }

    /// Order when finite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.torsion_invariants.iter().product())
        }
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let diag: Vec<BigInt> =
            self.torsion_invariants.iter().chain(other.torsion_invariants.iter()).cloned().collect();
        AbelianGroup::from_diagonal(&diag, self.free_rank + other.free_rank)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "1");
        }
        let mut parts: Vec<String> = self.torsion_invariants.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" x "))
    }
}

/// `Z^cols / rowspace(M)` together with the coordinate change that maps a
/// vector of `Z^cols` to its invariant-factor coordinates.
#[derive(Debug, Clone)]
pub struct Cokernel {
    pub group: AbelianGroup,
    /// column transform `V` of the Smith form
    transform: IntMatrix,
    /// kept coordinates: (column of `V`, modulus or zero for free)
    coords: Vec<(usize, BigInt)>,
}

impl Cokernel {
    /// Coordinates of `v` in the invariant-factor basis: torsion coordinates
    /// (reduced into `[0, d)`) first, then free coordinates.
    pub fn image(&self, v: &[BigInt]) -> Vec<BigInt> {
        let w = self.transform.left_apply(v);
        self.coords
            .iter()
            .map(|(j, d)| if d.is_zero() { w[*j].clone() } else { w[*j].mod_floor(d) })
            .collect()
    }

    /// Moduli of the coordinates returned by `image` (zero = free).
    pub fn moduli(&self) -> Vec<BigInt> {
        self.coords.iter().map(|(_, d)| d.clone()).collect()
    }

    pub fn is_zero(&self, v: &[BigInt]) -> bool {
        self.image(v).iter().all(Zero::is_zero)
    }
}

pub fn cokernel_map(m: &IntMatrix) -> Cokernel {
    let (s, _, v) = smith_normal_form(m);
    let diag = smith_diagonal(&s);
    let mut torsion = Vec::new();
    let mut free = Vec::new();
    for j in 0..m.cols {
        let d = diag.get(j).cloned().unwrap_or_else(BigInt::zero);
        if d.is_one() {
            continue;
        }
        if d.is_zero() {
            free.push((j, d));
        } else {
            torsion.push((j, d));
        }
    }
    let group = AbelianGroup {
        torsion_invariants: torsion.iter().map(|(_, d)| d.clone()).collect(),
        free_rank: free.len(),
    };
    torsion.extend(free);
    Cokernel { group, transform: v, coords: torsion }
}

/// Invariant factors of `Z^cols / rowspace(M)`.
pub fn cokernel(m: &IntMatrix) -> AbelianGroup {
    cokernel_map(m).group
}

/// Extended gcd: `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_small_cases() {
        let id = IntMatrix::identity(2);
        let (h, u) = hermite_normal_form(&id);
        assert_eq!(h, id);
        assert_eq!(u, id);

        let swap = IntMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let (h, u) = hermite_normal_form(&swap);
        assert_eq!(h, id);
        assert_eq!(u, swap);
    }

    #[test]
    fn snf_small_cases() {
        let (s, u, v) = smith_normal_form(&IntMatrix::from_i64(&[&[3, 0], &[0, 2]]));
        assert_eq!(smith_diagonal(&s), big(&[1, 6]));
        assert!(u.is_unimodular() && v.is_unimodular());

        let z = IntMatrix::zeros(2, 3);
        let (s, u, v) = smith_normal_form(&z);
        assert!(s.is_zero());
        assert_eq!(u, IntMatrix::identity(2));
        assert_eq!(v, IntMatrix::identity(3));
    }

    #[test]
    fn cokernel_cases() {
        assert_eq!(cokernel(&IntMatrix::zeros(0, 3)), AbelianGroup::free(3));
        assert!(cokernel(&IntMatrix::identity(4)).is_trivial());
        let g = cokernel(&IntMatrix::from_i64(&[&[2, 0], &[0, 0]]));
        assert_eq!(g.torsion_invariants, big(&[2]));
        assert_eq!(g.free_rank, 1);
        assert_eq!(g.to_string(), "Z/2 x Z");
        let k = cokernel_map(&IntMatrix::from_i64(&[&[2, -3]]));
        assert_eq!(k.group, AbelianGroup::free(1));
        // a -> +-3, b -> +-2
        let a = k.image(&big(&[1, 0]));
        let b = k.image(&big(&[0, 1]));
        assert_eq!(a[0].abs(), BigInt::from(3));
        assert_eq!(b[0].abs(), BigInt::from(2));
    }

    #[test]
    fn determinant_matches_cofactor() {
        let m = IntMatrix::from_i64(&[&[0, 2, 1], &[3, -1, 4], &[2, 5, -2]]);
        // 0*(2-20) - 2*(-6-8) + 1*(15+2) = 28 + 17
        assert_eq!(m.determinant(), BigInt::from(45));
    }
}
