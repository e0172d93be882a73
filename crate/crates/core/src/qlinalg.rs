//! Exact rational linear algebra: sparse matrices, formal sums, signed
//! orbit presentations and finite cochain complexes.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{input, Result};

pub type Rational = BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Finite Q-linear combination of labels. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormalSum<K: Ord> {
    terms: BTreeMap<K, Rational>,
}

impl<K: Ord> Default for FormalSum<K> {
    fn default() -> Self {
        FormalSum { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> FormalSum<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(k: K) -> Self {
        Self::term(k, q(1))
    }

    pub fn term(k: K, c: Rational) -> Self {
        let mut s = Self::zero();
        s.add_term(k, c);
        s
    }

    pub fn add_term(&mut self, k: K, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, c: &Rational) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn coeff(&self, k: &K) -> Rational {
        self.terms.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        out.add_assign_scaled(self, c);
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&q(-1))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &q(1));
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &q(-1));
        out
    }

    /// Linear extension of `f` on labels.
    pub fn map_linear<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> FormalSum<K2>) -> FormalSum<K2> {
        let mut out = FormalSum::zero();
        for (k, c) in &self.terms {
            out.add_assign_scaled(&f(k), c);
        }
        out
    }

    pub fn try_map_linear<K2: Ord + Clone>(
        &self,
        mut f: impl FnMut(&K) -> Result<FormalSum<K2>>,
    ) -> Result<FormalSum<K2>> {
        let mut out = FormalSum::zero();
        for (k, c) in &self.terms {
            out.add_assign_scaled(&f(k)?, c);
        }
        Ok(out)
    }
}

impl<K: Ord + Clone> std::iter::FromIterator<(K, Rational)> for FormalSum<K> {
    fn from_iter<I: IntoIterator<Item = (K, Rational)>>(iter: I) -> Self {
        let mut s = Self::zero();
        for (k, c) in iter {
            s.add_term(k, c);
        }
        s
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for FormalSum<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*{:?}", c, k)?;
        }
        Ok(())
    }
}

/// Column-major sparse rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatQ {
    rows: usize,
    cols: Vec<BTreeMap<usize, Rational>>,
}

impl fmt::Debug for SparseMatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseMatQ {}x{} ", self.rows, self.cols.len())?;
        f.debug_list().entries(self.to_dense().iter().map(|r| {
            r.iter().map(|x| x.to_string()).collect::<Vec<_>>()
        })).finish()
    }
}

impl SparseMatQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatQ { rows, cols: vec![BTreeMap::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, q(1));
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), ncols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), ncols, "ragged rows");
            for (j, v) in r.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rs: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        Self::from_rows(&rs)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.cols[c].get(&r).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        assert!(r < self.rows && c < self.cols.len());
        if v.is_zero() {
            self.cols[c].remove(&r);
        } else {
            self.cols[c].insert(r, v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Rational) {
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    pub fn column(&self, c: usize) -> &BTreeMap<usize, Rational> {
        &self.cols[c]
    }

    pub fn set_column(&mut self, c: usize, entries: BTreeMap<usize, Rational>) {
        assert!(entries.keys().all(|&r| r < self.rows));
        self.cols[c] = entries.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols(), self.rows);
        for (j, col) in self.cols.iter().enumerate() {
            for (&i, v) in col {
                t.cols[i].insert(j, v.clone());
            }
        }
        t
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &SparseMatQ) -> Result<SparseMatQ> {
        if self.ncols() != rhs.nrows() {
            return input(format!(
                "dimension mismatch: {}x{} times {}x{}",
                self.rows,
                self.ncols(),
                rhs.rows,
                rhs.ncols()
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.ncols());
        for (j, rcol) in rhs.cols.iter().enumerate() {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (&k, b) in rcol {
                for (&i, a) in &self.cols[k] {
                    *acc.entry(i).or_insert_with(Rational::zero) += a * b;
                }
            }
            out.set_column(j, acc);
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.ncols());
        let mut out = vec![Rational::zero(); self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            if v[j].is_zero() {
                continue;
            }
            for (&i, a) in col {
                out[i] += a * &v[j];
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut d = vec![vec![Rational::zero(); self.ncols()]; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for (&i, v) in col {
                d[i][j] = v.clone();
            }
        }
        d
    }

    pub fn rank(&self) -> usize {
        echelon(self).pivots.len()
    }
}

struct Echelon {
    /// Integer echelon rows, one per pivot.
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

fn integer_rows(m: &SparseMatQ) -> Vec<Vec<BigInt>> {
    let dense = m.to_dense();
    dense
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            r.into_iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect()
}

/// Bareiss fraction-free elimination; pivot rows are chosen with the fewest
/// nonzero entries.
fn echelon(m: &SparseMatQ) -> Echelon {
    let mut a = integer_rows(m);
    let ncols = m.ncols();
    let nr = a.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nr {
            break;
        }
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(r) {
            if !row[c].is_zero() {
                let w = row[c..].iter().filter(|x| !x.is_zero()).count();
                if best.map_or(true, |(_, bw)| w < bw) {
                    best = Some((i, w));
                }
            }
        }
        let Some((p, _)) = best else { continue };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let prow = &head[r];
        let piv = prow[c].clone();
        for row in tail.iter_mut() {
            let f = row[c].clone();
            for j in c..ncols {
                let v = &piv * &row[j] - &f * &prow[j];
                row[j] = v / &prev;
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    for row in a.iter_mut() {
        let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if !g.is_zero() && !g.is_one() {
            for x in row.iter_mut() {
                *x = &*x / &g;
            }
        }
    }
    Echelon { rows: a, pivots }
}

fn primitive(v: Vec<Rational>) -> Vec<Rational> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter().map(|x| Rational::from_integer(x / &g * &sign)).collect()
}

/// Rank and a kernel basis of primitive integer vectors, first nonzero entry positive.
pub fn rank_kernel(m: &SparseMatQ) -> (usize, Vec<Vec<Rational>>) {
    let e = echelon(m);
    let n = m.ncols();
    let r = e.pivots.len();
    // reduce to RREF over Q using the r echelon rows
    let mut rows: Vec<Vec<Rational>> =
        e.rows.iter().map(|row| row.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
    for i in (0..r).rev() {
        let pc = e.pivots[i];
        let inv = rows[i][pc].recip();
        for x in rows[i].iter_mut() {
            *x *= &inv;
        }
        for k in 0..i {
            let f = rows[k][pc].clone();
            if f.is_zero() {
                continue;
            }
            let (upper, lower) = rows.split_at_mut(i);
            for (x, y) in upper[k].iter_mut().zip(lower[0].iter()) {
                *x -= &f * y;
            }
        }
    }
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; n];
        for &p in &e.pivots {
            v[p] = true;
        }
        v
    };
    let mut kernel = Vec::new();
    for f in 0..n {
        if is_pivot[f] {
            continue;
        }
        let mut v = vec![Rational::zero(); n];
        v[f] = q(1);
        for (i, &pc) in e.pivots.iter().enumerate() {
            v[pc] = -rows[i][f].clone();
        }
        kernel.push(primitive(v));
    }
    (r, kernel)
}

/// True iff `d2 · d1 = 0`.
pub fn chain_check(d1: &SparseMatQ, d2: &SparseMatQ) -> Result<bool> {
    if d2.ncols() != d1.nrows() {
        return input(format!("chain_check: d2 has {} columns but d1 has {} rows", d2.ncols(), d1.nrows()));
    }
    Ok(d2.mul(d1)?.is_zero())
}

/// Union-find with signs. `relate(a, b, s)` imposes `a = s·b`.
#[derive(Clone, Debug)]
pub struct SignedOrbitPresentation<K: Ord + Clone> {
    labels: Vec<K>,
    index: BTreeMap<K, usize>,
    parent: Vec<usize>,
    sign: Vec<i8>,
    collided: Vec<bool>,
}

/// Canonical basis of a signed-orbit quotient.
#[derive(Clone, Debug)]
pub struct Presentation<K: Ord + Clone> {
    pub basis: Vec<K>,
    proj: BTreeMap<K, Option<(usize, i8)>>,
}

impl<K: Ord + Clone + fmt::Debug> SignedOrbitPresentation<K> {
    pub fn new(gens: impl IntoIterator<Item = K>) -> Self {
        let mut labels: Vec<K> = gens.into_iter().collect();
        labels.sort();
        labels.dedup();
        let index = labels.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let n = labels.len();
        SignedOrbitPresentation { labels, index, parent: (0..n).collect(), sign: vec![1; n], collided: vec![false; n] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, k: &K) -> bool {
        self.index.contains_key(k)
    }

    fn find(&mut self, i: usize) -> (usize, i8) {
        let mut path = Vec::new();
        let mut cur = i;
        while self.parent[cur] != cur {
            path.push(cur);
            cur = self.parent[cur];
        }
        let root = cur;
        // compress: walk from the node nearest the root outward
        let mut acc = 1i8;
        for &node in path.iter().rev() {
            acc *= self.sign[node];
            self.sign[node] = acc;
            self.parent[node] = root;
        }
        (root, if path.is_empty() { 1 } else { self.sign[i] })
    }

    fn idx(&self, k: &K) -> Result<usize> {
        match self.index.get(k) {
            Some(&i) => Ok(i),
            None => input(format!("unknown generator {:?}", k)),
        }
    }

    pub fn relate(&mut self, a: &K, b: &K, s: i8) -> Result<()> {
        let (ia, ib) = (self.idx(a)?, self.idx(b)?);
        let (ra, sa) = self.find(ia);
        let (rb, sb) = self.find(ib);
        if ra == rb {
            if sa != s * sb {
                self.collided[ra] = true;
            }
            return Ok(());
        }
        // g_ra = sa·s·sb·g_rb
        self.parent[ra] = rb;
        self.sign[ra] = sa * s * sb;
        if self.collided[ra] {
            self.collided[rb] = true;
        }
        Ok(())
    }

    /// Imposes `a = 0`.
    pub fn kill(&mut self, a: &K) -> Result<()> {
        self.relate(a, a, -1)
    }

    pub fn finish(mut self) -> Presentation<K> {
        let n = self.labels.len();
        let mut rep: BTreeMap<usize, (usize, i8)> = BTreeMap::new();
        let mut found = Vec::with_capacity(n);
        for i in 0..n {
            let (r, s) = self.find(i);
            found.push((r, s));
            rep.entry(r).or_insert((i, s));
        }
        let mut basis = Vec::new();
        let mut slot: BTreeMap<usize, usize> = BTreeMap::new();
        for i in 0..n {
            let (r, _) = found[i];
            if self.collided[r] {
                continue;
            }
            if rep[&r].0 == i {
                slot.insert(r, basis.len());
                basis.push(self.labels[i].clone());
            }
        }
        let mut proj = BTreeMap::new();
        for i in 0..n {
            let (r, s) = found[i];
            let v = if self.collided[r] { None } else { Some((slot[&r], s * rep[&r].1)) };
            proj.insert(self.labels[i].clone(), v);
        }
        Presentation { basis, proj }
    }
}

impl<K: Ord + Clone + fmt::Debug> Presentation<K> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `(basis index, sign)` or `None` when the generator projects to zero.
    pub fn coordinate(&self, k: &K) -> Result<Option<(usize, i8)>> {
        match self.proj.get(k) {
            Some(v) => Ok(*v),
            None => input(format!("unknown generator {:?}", k)),
        }
    }

    pub fn projection(&self, k: &K) -> Result<FormalSum<K>> {
        Ok(match self.coordinate(k)? {
            None => FormalSum::zero(),
            Some((i, s)) => FormalSum::term(self.basis[i].clone(), q(s as i64)),
        })
    }

    /// Coordinates in the basis, as a map index → coefficient.
    pub fn project_sum(&self, s: &FormalSum<K>) -> Result<BTreeMap<usize, Rational>> {
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        for (k, c) in s.iter() {
            if let Some((i, sg)) = self.coordinate(k)? {
                *out.entry(i).or_insert_with(Rational::zero) += c * q(sg as i64);
            }
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    pub fn labels(&self) -> impl Iterator<Item = &K> {
        self.proj.keys()
    }
}

pub fn orbit_presentation<K: Ord + Clone + fmt::Debug>(
    gens: &[K],
    relations: &[(K, K, i8)],
) -> Result<Presentation<K>> {
    let mut p = SignedOrbitPresentation::new(gens.iter().cloned());
    for (a, b, s) in relations {
        p.relate(a, b, *s)?;
    }
    Ok(p.finish())
}

/// Matrix of a linear map between presented modules given on source basis labels.
pub fn map_matrix<K: Ord + Clone + fmt::Debug, K2: Ord + Clone + fmt::Debug>(
    src: &Presentation<K>,
    dst: &Presentation<K2>,
    mut f: impl FnMut(&K) -> Result<FormalSum<K2>>,
) -> Result<SparseMatQ> {
    let mut m = SparseMatQ::zeros(dst.dim(), src.dim());
    for (j, b) in src.basis.iter().enumerate() {
        let img = f(b)?;
        m.set_column(j, dst.project_sum(&img)?);
    }
    Ok(m)
}

/// Cochain complex `C^0 → C^1 → …` with `diffs[k]: C^k → C^{k+1}`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub dims: Vec<usize>,
    pub diffs: Vec<SparseMatQ>,
}

impl ChainComplex {
    pub fn new(dims: Vec<usize>, diffs: Vec<SparseMatQ>) -> Result<Self> {
        if diffs.len() + 1 != dims.len() {
            return input("complex needs one differential between consecutive degrees");
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.ncols() != dims[k] || d.nrows() != dims[k + 1] {
                return input(format!("differential {} has wrong shape", k));
            }
        }
        Ok(ChainComplex { dims, diffs })
    }

    pub fn is_complex(&self) -> Result<bool> {
        for w in self.diffs.windows(2) {
            if !chain_check(&w[0], &w[1])? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn cohomology_dims(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.diffs.iter().map(|d| d.rank()).collect();
        (0..self.dims.len())
            .map(|k| {
                let out = if k < ranks.len() { ranks[k] } else { 0 };
                let inc = if k > 0 { ranks[k - 1] } else { 0 };
                self.dims[k] - out - inc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_kernel_proportional_rows() {
        let m = SparseMatQ::from_i64(&[&[1, 2], &[2, 4]]);
        let (r, k) = rank_kernel(&m);
        assert_eq!(r, 1);
        assert_eq!(k, vec![vec![q(2), q(-1)]]);
    }

    #[test]
    fn rank_kernel_identity_and_empty() {
        let (r, k) = rank_kernel(&SparseMatQ::identity(3));
        assert_eq!((r, k.len()), (3, 0));
        let (r, k) = rank_kernel(&SparseMatQ::zeros(0, 4));
        assert_eq!((r, k.len()), (0, 4));
    }

    #[test]
    fn rank_kernel_rational_entries() {
        let m = SparseMatQ::from_rows(&[vec![qf(1, 2), qf(1, 3), q(0)], vec![q(3), q(2), q(0)]]);
        let (r, k) = rank_kernel(&m);
        assert_eq!(r, 1);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn orbit_sign_collision() {
        let p = orbit_presentation(&["g"], &[("g", "g", -1)]).unwrap();
        assert!(p.basis.is_empty());
        assert!(p.projection(&"g").unwrap().is_zero());
    }

    #[test]
    fn orbit_identification() {
        let p = orbit_presentation(&["g1", "g2"], &[("g1", "g2", 1)]).unwrap();
        assert_eq!(p.basis, vec!["g1"]);
        assert_eq!(p.projection(&"g2").unwrap(), FormalSum::single("g1"));
    }

    #[test]
    fn orbit_unknown_label() {
        assert!(orbit_presentation(&["a"], &[("a", "b", 1)]).is_err());
    }

    #[test]
    fn orbit_z3_pairs() {
        // enumerate (Z/3)^2 - 0 under (c,d)=-(d,c)=(-c,-d), (ec,d)=(c,d)
        let gens: Vec<(i64, i64)> =
            (0..3).flat_map(|c| (0..3).map(move |d| (c, d))).filter(|&p| p != (0, 0)).collect();
        let mut rels = Vec::new();
        for &(c, d) in &gens {
            rels.push(((c, d), (d, c), -1));
            rels.push(((c, d), ((3 - c) % 3, (3 - d) % 3), 1));
            rels.push(((c, d), ((3 - c) % 3, d), 1));
        }
        let p = orbit_presentation(&gens, &rels).unwrap();
        assert_eq!(p.dim(), 1);
        // oracle: brute-force orbit closure with signs
        let mut alive = 0;
        let mut seen = std::collections::BTreeSet::new();
        for &g in &gens {
            if seen.contains(&g) {
                continue;
            }
            let mut orbit: BTreeMap<(i64, i64), i8> = BTreeMap::new();
            let mut stack = vec![(g, 1i8)];
            let mut bad = false;
            while let Some((x, s)) = stack.pop() {
                if let Some(&t) = orbit.get(&x) {
                    bad |= t != s;
                    continue;
                }
                orbit.insert(x, s);
                for (a, b, sg) in &rels {
                    if *a == x {
                        stack.push((*b, s * sg));
                    }
                    if *b == x {
                        stack.push((*a, s * sg));
                    }
                }
            }
            seen.extend(orbit.keys().cloned());
            if !bad {
                alive += 1;
            }
        }
        assert_eq!(alive, 1);
    }

    #[test]
    fn chain_check_examples() {
        let z = SparseMatQ::zeros(2, 1);
        assert!(chain_check(&z, &SparseMatQ::from_i64(&[&[1, -1]])).unwrap());
        let d1 = SparseMatQ::from_i64(&[&[1], &[1]]);
        assert!(chain_check(&d1, &SparseMatQ::from_i64(&[&[1, -1]])).unwrap());
        let d1 = SparseMatQ::from_i64(&[&[1], &[0]]);
        assert!(!chain_check(&d1, &SparseMatQ::from_i64(&[&[1, 0]])).unwrap());
        assert!(chain_check(&d1, &SparseMatQ::from_i64(&[&[1, 0, 0]])).is_err());
    }

    #[test]
    fn cohomology_of_interval() {
        let c = ChainComplex::new(vec![2, 1], vec![SparseMatQ::from_i64(&[&[1, -1]])]).unwrap();
        assert_eq!(c.cohomology_dims(), vec![1, 0]);
    }

    fn small_matrix() -> impl Strategy<Value = SparseMatQ> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..4, r * c).prop_map(move |v| {
                let rows: Vec<Vec<Rational>> = v.chunks(c).map(|ch| ch.iter().map(|&x| q(x)).collect()).collect();
                SparseMatQ::from_rows(&rows)
            })
        })
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(m in small_matrix()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn kernel_is_annihilated(m in small_matrix()) {
            let (r, k) = rank_kernel(&m);
            prop_assert_eq!(r + k.len(), m.ncols());
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
            }
            if !k.is_empty() {
                let km = SparseMatQ::from_rows(&k);
                prop_assert_eq!(km.rank(), k.len());
            }
        }

        #[test]
        fn relation_free_is_identity(n in 0usize..10) {
            let gens: Vec<usize> = (0..n).collect();
            let p = orbit_presentation(&gens, &[]).unwrap();
            prop_assert_eq!(p.basis.clone(), gens.clone());
            for g in &gens {
                prop_assert_eq!(p.projection(g).unwrap(), FormalSum::single(*g));
            }
        }
    }
}
