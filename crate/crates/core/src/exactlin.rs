//! Exact rational scalars, sign bookkeeping and small linear algebra.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinError {
    #[error("cannot parse scalar `{0}`")]
    BadScalar(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("invalid permutation {0:?}")]
    BadPermutation(Vec<usize>),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Exact rational number with canonical sign on the numerator.
///
/// Arithmetic is overflow-checked and panics instead of wrapping.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q(Ratio<i128>);

impl Q {
    pub fn new(num: i128, den: i128) -> Result<Q, LinError> {
        if den == 0 {
            return Err(LinError::ZeroDenominator);
        }
        Ok(Q(Ratio::new(num, den)))
    }
    pub fn int(n: i64) -> Q {
        Q(Ratio::from_integer(n as i128))
    }
    pub fn zero() -> Q {
        Q(Ratio::zero())
    }
    pub fn one() -> Q {
        Q(Ratio::one())
    }
    pub fn sign(s: i32) -> Q {
        Q::int(s as i64)
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }
    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }
    pub fn recip(&self) -> Q {
        assert!(!self.is_zero(), "reciprocal of zero");
        Q(self.0.recip())
    }
    pub fn abs(&self) -> Q {
        Q(self.0.abs())
    }
    pub fn checked_div(&self, o: &Q) -> Option<Q> {
        self.0.checked_div(&o.0).map(Q)
    }
    /// 1/n!
    pub fn inv_factorial(n: usize) -> Q {
        let mut f: i128 = 1;
        for k in 2..=n as i128 {
            f = f.checked_mul(k).expect("factorial overflow");
        }
        Q(Ratio::new(1, f))
    }
}

impl Default for Q {
    fn default() -> Self {
        Q::zero()
    }
}

impl Add for Q {
    type Output = Q;
    fn add(self, o: Q) -> Q {
        Q(self.0.checked_add(&o.0).expect("rational overflow"))
    }
}
impl AddAssign for Q {
    fn add_assign(&mut self, o: Q) {
        *self = *self + o;
    }
}
impl Sub for Q {
    type Output = Q;
    fn sub(self, o: Q) -> Q {
        Q(self.0.checked_sub(&o.0).expect("rational overflow"))
    }
}
impl Mul for Q {
    type Output = Q;
    fn mul(self, o: Q) -> Q {
        Q(self.0.checked_mul(&o.0).expect("rational overflow"))
    }
}
impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q(-self.0)
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}
impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Q {
    type Err = LinError;
    fn from_str(s: &str) -> Result<Q, LinError> {
        let bad = || LinError::BadScalar(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i128 = n.trim().parse().map_err(|_| bad())?;
                let d: i128 = d.trim().parse().map_err(|_| bad())?;
                Q::new(n, d)
            }
            None => s.parse::<i128>().map(|n| Q(Ratio::from_integer(n))).map_err(|_| bad()),
        }
    }
}

impl Serialize for Q {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Finite formal linear combination of keys with rational coefficients.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lin<K: Ord>(BTreeMap<K, Q>);

impl<K: Ord> Default for Lin<K> {
    fn default() -> Self {
        Lin(BTreeMap::new())
    }
}

impl<K: Ord + Clone> Lin<K> {
    pub fn new() -> Self {
        Lin(BTreeMap::new())
    }
    pub fn single(k: K, c: Q) -> Self {
        let mut l = Lin::new();
        l.add_term(k, c);
        l
    }
    pub fn add_term(&mut self, k: K, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(k);
        match e {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }
    pub fn add_scaled(&mut self, other: &Lin<K>, c: Q) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.0 {
            self.add_term(k.clone(), *v * c);
        }
    }
    pub fn scaled(&self, c: Q) -> Lin<K> {
        if c.is_zero() {
            return Lin::new();
        }
        Lin(self.0.iter().map(|(k, v)| (k.clone(), *v * c)).collect())
    }
    pub fn get(&self, k: &K) -> Q {
        self.0.get(k).copied().unwrap_or_default()
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn iter(&self) -> impl Iterator<Item = (&K, &Q)> {
        self.0.iter()
    }
    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.0.keys()
    }
    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> (K2, Q)) -> Lin<K2> {
        let mut out = Lin::new();
        for (k, v) in &self.0 {
            let (k2, c) = f(k);
            out.add_term(k2, c * *v);
        }
        out
    }
    pub fn retain(&mut self, mut f: impl FnMut(&K) -> bool) {
        self.0.retain(|k, _| f(k));
    }
}

impl<K: Ord + Clone> FromIterator<(K, Q)> for Lin<K> {
    fn from_iter<I: IntoIterator<Item = (K, Q)>>(it: I) -> Self {
        let mut l = Lin::new();
        for (k, c) in it {
            l.add_term(k, c);
        }
        l
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for Lin<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

/// Sparse vector over a flat basis `0..dim`.
pub type Vector = Lin<usize>;

pub fn sign_of(parity: i64) -> i32 {
    if parity.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Permutation given by its image list (0-based). `images[i]` is the old
/// position of the item that ends up at position `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, LinError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(LinError::BadPermutation(images));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }
    pub fn images(&self) -> &[usize] {
        &self.0
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    /// Reorder by `self` first, then by `then`.
    pub fn then(&self, then: &Permutation) -> Permutation {
        Permutation(then.0.iter().map(|&j| self.0[j]).collect())
    }
    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }
    pub fn apply<T: Clone>(&self, items: &[T]) -> Vec<T> {
        self.0.iter().map(|&i| items[i].clone()).collect()
    }
    pub fn sign(&self) -> i32 {
        koszul_sign(&self.0, &vec![1; self.0.len()])
    }
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == n {
                out.push(Permutation(cur.clone()));
                return;
            }
            for i in 0..n {
                if !used[i] {
                    used[i] = true;
                    cur.push(i);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        rec(n, &mut cur, &mut used, &mut out);
        out
    }
}

/// Koszul sign of reordering items of the given degrees so that position `i`
/// receives the item formerly at `images[i]`.
pub fn koszul_sign(images: &[usize], degrees: &[i32]) -> i32 {
    let mut parity = 0i64;
    for i in 0..images.len() {
        if degrees[images[i]] % 2 == 0 {
            continue;
        }
        for j in i + 1..images.len() {
            if images[j] < images[i] && degrees[images[j]] % 2 != 0 {
                parity += 1;
            }
        }
    }
    sign_of(parity)
}

/// All (p,q)-shuffles, in lexicographic order of their image lists.
/// As reorderings these are the unshuffles: the first `p` positions receive
/// an increasing subset, the rest its increasing complement.
pub fn shuffles(p: usize, q: usize) -> Vec<Permutation> {
    subsets(p + q, p)
        .into_iter()
        .map(|s| {
            let mut images = s.clone();
            images.extend((0..p + q).filter(|i| !s.contains(i)));
            Permutation(images)
        })
        .collect()
}

/// Increasing `k`-subsets of `0..n`, lexicographic.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Dense rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }
    pub fn get(&self, r: usize, c: usize) -> Q {
        self.data[r * self.cols + c]
    }
    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        self.data[r * self.cols + c] = v;
    }
    pub fn add_at(&mut self, r: usize, c: usize, v: Q) {
        let i = r * self.cols + c;
        self.data[i] += v;
    }

    /// Rank by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut prev = Q::one();
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(piv) = (rank..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if piv != rank {
                for c in 0..m.cols {
                    m.data.swap(piv * m.cols + c, rank * m.cols + c);
                }
            }
            let p = m.get(rank, col);
            for r in rank + 1..m.rows {
                let f = m.get(r, col);
                for c in 0..m.cols {
                    let v = (p * m.get(r, c) - f * m.get(rank, c))
                        .checked_div(&prev)
                        .expect("nonzero pivot");
                    m.set(r, c, v);
                }
            }
            prev = p;
            rank += 1;
        }
        rank
    }

    /// One solution of `self * x = b`, if any.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.rows);
        let cols = self.cols + 1;
        let mut m = Matrix::zeros(self.rows, cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c));
            }
            m.set(r, self.cols, b[r]);
        }
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            let Some(piv) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            for c in 0..cols {
                m.data.swap(piv * cols + c, row * cols + c);
            }
            let inv = m.get(row, col).recip();
            for c in 0..cols {
                let v = m.get(row, c) * inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r != row {
                    let f = m.get(r, col);
                    if !f.is_zero() {
                        for c in 0..cols {
                            let v = m.get(r, c) - f * m.get(row, c);
                            m.set(r, c, v);
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if (row..m.rows).any(|r| !m.get(r, self.cols).is_zero()) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = m.get(r, self.cols);
        }
        Some(x)
    }
}

/// Finite-dimensional chain complex with homological grading (|d| = -1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainComplex {
    pub degrees: Vec<i32>,
    /// `diff[i]` is d(e_i) as a sparse combination of basis vectors.
    pub diff: Vec<Vec<(usize, Q)>>,
}

impl ChainComplex {
    pub fn new(degrees: Vec<i32>, diff: Vec<Vec<(usize, Q)>>) -> Result<Self, LinError> {
        if diff.len() != degrees.len() {
            return Err(LinError::Dimension("differential rows".into()));
        }
        for (i, row) in diff.iter().enumerate() {
            for &(j, _) in row {
                if j >= degrees.len() || degrees[j] != degrees[i] - 1 {
                    return Err(LinError::Dimension(format!("d(e{i}) leaves degree")));
                }
            }
        }
        let c = ChainComplex { degrees, diff };
        for i in 0..c.dim() {
            let mut dd = Vector::new();
            for &(j, a) in &c.diff[i] {
                for &(k, b) in &c.diff[j] {
                    dd.add_term(k, a * b);
                }
            }
            if !dd.is_zero() {
                return Err(LinError::Dimension(format!("d^2(e{i}) != 0")));
            }
        }
        Ok(c)
    }
    /// Graded space with zero differential.
    pub fn graded(degrees: Vec<i32>) -> Self {
        let n = degrees.len();
        ChainComplex { degrees, diff: vec![Vec::new(); n] }
    }
    pub fn ground() -> Self {
        ChainComplex::graded(vec![0])
    }
    pub fn dim(&self) -> usize {
        self.degrees.len()
    }
    pub fn is_zero_differential(&self) -> bool {
        self.diff.iter().all(|r| r.is_empty())
    }

    pub fn homology_ranks(&self) -> BTreeMap<i32, usize> {
        homology_ranks(self)
    }
}

/// Betti numbers per degree.
pub fn homology_ranks(c: &ChainComplex) -> BTreeMap<i32, usize> {
    let mut by_deg: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, &d) in c.degrees.iter().enumerate() {
        by_deg.entry(d).or_default().push(i);
    }
    let rank_of = |k: i32| -> usize {
        let (Some(src), Some(tgt)) = (by_deg.get(&k), by_deg.get(&(k - 1))) else {
            return 0;
        };
        let mut m = Matrix::zeros(tgt.len(), src.len());
        for (col, &i) in src.iter().enumerate() {
            for &(j, a) in &c.diff[i] {
                let row = tgt.iter().position(|&t| t == j).unwrap();
                m.add_at(row, col, a);
            }
        }
        m.rank()
    };
    by_deg
        .iter()
        .map(|(&k, basis)| (k, basis.len() - rank_of(k) - rank_of(k + 1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i128, d: i128) -> Q {
        Q::new(n, d).unwrap()
    }

    #[test]
    fn scalar_normal_form() {
        assert_eq!(q(2, -4).to_string(), "-1/2");
        assert_eq!("6/3".parse::<Q>().unwrap(), Q::int(2));
        assert!(Q::new(1, 0).is_err());
        assert_eq!(Q::inv_factorial(4), q(1, 24));
    }

    #[test]
    fn koszul_transposition_of_odd_items() {
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]), -1);
        assert_eq!(koszul_sign(&[1, 0], &[1, 2]), 1);
        assert_eq!(koszul_sign(&[2, 0, 1], &[1, 1, 1]), 1);
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(shuffles(2, 2).len(), 6);
        assert_eq!(shuffles(1, 2)[0].images(), &[0, 1, 2]);
        assert_eq!(shuffles(1, 2)[2].images(), &[2, 0, 1]);
    }

    #[test]
    fn bareiss_rank_and_solve() {
        let mut m = Matrix::zeros(3, 3);
        let vals = [1, 2, 3, 2, 4, 6, 1, 0, 1];
        for (i, v) in vals.iter().enumerate() {
            m.data[i] = Q::int(*v);
        }
        assert_eq!(m.rank(), 2);
        let x = m.solve(&[Q::int(2), Q::int(4), Q::int(0)]).unwrap();
        for r in 0..3 {
            let s = (0..3).fold(Q::zero(), |acc, c| acc + m.get(r, c) * x[c]);
            assert_eq!(s, [Q::int(2), Q::int(4), Q::int(0)][r]);
        }
        assert!(m.solve(&[Q::int(1), Q::int(0), Q::int(0)]).is_none());
    }

    #[test]
    fn homology_of_small_complexes() {
        let acyclic = ChainComplex::new(vec![0, 1], vec![vec![], vec![(0, Q::one())]]).unwrap();
        assert!(acyclic.homology_ranks().values().all(|&r| r == 0));
        let circle = ChainComplex::new(
            vec![0, 0, 1, 1],
            vec![vec![], vec![], vec![(0, Q::one()), (1, -Q::one())], vec![(0, -Q::one()), (1, Q::one())]],
        )
        .unwrap();
        let h = circle.homology_ranks();
        assert_eq!(h[&0], 1);
        assert_eq!(h[&1], 1);
        assert!(ChainComplex::new(vec![0, 1], vec![vec![], vec![(1, Q::one())]]).is_err());
    }

    proptest! {
        #[test]
        fn koszul_is_multiplicative(seed in any::<u64>(), n in 1usize..6) {
            use rand::{seq::SliceRandom, Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let degs: Vec<i32> = (0..n).map(|_| rng.random_range(-2..3)).collect();
            let mut a: Vec<usize> = (0..n).collect();
            a.shuffle(&mut rng);
            let mut b: Vec<usize> = (0..n).collect();
            b.shuffle(&mut rng);
            let s = Permutation::new(a).unwrap();
            let t = Permutation::new(b).unwrap();
            let moved = s.apply(&degs);
            let both = s.then(&t);
            prop_assert_eq!(koszul_sign(both.images(), &degs),
                koszul_sign(s.images(), &degs) * koszul_sign(t.images(), &moved));
            prop_assert_eq!(both.apply(&degs), t.apply(&moved));
        }

        #[test]
        fn scalar_field_laws(a in -50i128..50, b in 1i128..20, c in -50i128..50, d in 1i128..20) {
            let x = q(a, b);
            let y = q(c, d);
            prop_assert_eq!(x + y, y + x);
            prop_assert_eq!((x + y) - y, x);
            prop_assert_eq!(x * (y + x), x * y + x * x);
        }
    }
}
