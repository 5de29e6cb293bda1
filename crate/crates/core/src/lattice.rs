//! Integer row lattices in echelon form.
//!
//! Rows are sparse integer vectors. Insertion keeps one row per pivot column
//! with a positive pivot, combining rows by extended gcd, so the stored rows
//! always form a basis of the integer span. Arithmetic runs on checked `i64`
//! and is redone on big integers if any step would overflow.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub type SparseRow = Vec<(usize, i64)>;

trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn from_i64(v: i64) -> Self;
    fn to_i64(&self) -> Option<i64>;
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    fn div_floor(&self, o: &Self) -> Self;
    fn is_multiple_of(&self, o: &Self) -> bool;
    /// `(g, s, t)` with `g = s*a + t*b`, `g > 0`.
    fn ext_gcd(a: &Self, b: &Self) -> (Self, Self, Self);
    fn div_exact(&self, o: &Self) -> Self;
}

impl Scalar for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn to_i64(&self) -> Option<i64> {
        Some(*self)
    }
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn div_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn is_multiple_of(&self, o: &Self) -> bool {
        Integer::is_multiple_of(self, o)
    }
    fn ext_gcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        let e = a.extended_gcd(b);
        if e.gcd < 0 {
            (-e.gcd, -e.x, -e.y)
        } else {
            (e.gcd, e.x, e.y)
        }
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

impl Scalar for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn to_i64(&self) -> Option<i64> {
        ToPrimitive::to_i64(self)
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn div_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn is_multiple_of(&self, o: &Self) -> bool {
        Integer::is_multiple_of(self, o)
    }
    fn ext_gcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        let e = a.extended_gcd(b);
        if Signed::is_negative(&e.gcd) {
            (-e.gcd, -e.x, -e.y)
        } else {
            (e.gcd, e.x, e.y)
        }
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

struct Overflow;

type Row<T> = Vec<(usize, T)>;

/// `a*x + b*y` on sparse rows.
fn combine<T: Scalar>(a: &T, x: &Row<T>, b: &T, y: &Row<T>) -> Result<Row<T>, Overflow> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let (col, v) = if j >= y.len() || (i < x.len() && x[i].0 < y[j].0) {
            let v = a.mul(&x[i].1).ok_or(Overflow)?;
            i += 1;
            (x[i - 1].0, v)
        } else if i >= x.len() || y[j].0 < x[i].0 {
            let v = b.mul(&y[j].1).ok_or(Overflow)?;
            j += 1;
            (y[j - 1].0, v)
        } else {
            let u = a.mul(&x[i].1).ok_or(Overflow)?;
            let w = b.mul(&y[j].1).ok_or(Overflow)?;
            i += 1;
            j += 1;
            (x[i - 1].0, u.add(&w).ok_or(Overflow)?)
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    Ok(out)
}

struct Echelon<T> {
    pivots: BTreeMap<usize, Row<T>>,
}

impl<T: Scalar> Echelon<T> {
    fn new() -> Self {
        Echelon { pivots: BTreeMap::new() }
    }

    fn insert(&mut self, mut r: Row<T>) -> Result<(), Overflow> {
        let one = T::from_i64(1);
        loop {
            let Some(&(col, ref v)) = r.first() else { return Ok(()) };
            let v = v.clone();
            match self.pivots.get(&col) {
                None => {
                    if v.is_negative() {
                        let m = one.neg().ok_or(Overflow)?;
                        r = combine(&m, &r, &T::zero(), &Vec::new())?;
                    }
                    self.pivots.insert(col, r);
                    return Ok(());
                }
                Some(p) => {
                    let pv = p[0].1.clone();
                    if v.is_multiple_of(&pv) {
                        let k = v.div_exact(&pv).neg().ok_or(Overflow)?;
                        r = combine(&one, &r, &k, p)?;
                    } else {
                        let (g, s, t) = T::ext_gcd(&pv, &v);
                        let new_pivot = combine(&s, p, &t, &r)?;
                        let a = v.div_exact(&g);
                        let b = pv.div_exact(&g).neg().ok_or(Overflow)?;
                        let rest = combine(&a, p, &b, &r)?;
                        self.pivots.insert(col, new_pivot);
                        r = rest;
                    }
                }
            }
        }
    }

    /// Reduce `x` modulo the lattice; with `exact` stop at the first column
    /// that cannot be cleared.
    fn reduce(&self, mut x: Row<T>, exact: bool) -> Result<Option<Row<T>>, Overflow> {
        let one = T::from_i64(1);
        let mut idx = 0;
        while idx < x.len() {
            let (col, v) = x[idx].clone();
            match self.pivots.get(&col) {
                None => {
                    if exact {
                        return Ok(None);
                    }
                    idx += 1;
                }
                Some(p) => {
                    let pv = &p[0].1;
                    let k = if exact {
                        if !v.is_multiple_of(pv) {
                            return Ok(None);
                        }
                        v.div_exact(pv)
                    } else {
                        v.div_floor(pv)
                    };
                    if !k.is_zero() {
                        x = combine(&one, &x, &k.neg().ok_or(Overflow)?, p)?;
                    }
                    // entries left of `col` are untouched, so resume there
                    idx = x.iter().position(|(c, _)| *c > col).unwrap_or(x.len());
                    if x.iter().any(|(c, _)| *c == col) && exact {
                        return Ok(None);
                    }
                }
            }
        }
        Ok(Some(x))
    }
}

fn lift<T: Scalar>(r: &SparseRow) -> Row<T> {
    r.iter().map(|(c, v)| (*c, T::from_i64(*v))).collect()
}

enum Inner {
    Small(Echelon<i64>),
    Big(Echelon<BigInt>),
}

/// The integer span of a set of sparse rows.
pub struct Lattice {
    inner: Inner,
}

impl Lattice {
    pub fn from_rows<'a, I>(rows: I) -> Lattice
    where
        I: IntoIterator<Item = &'a SparseRow> + Clone,
    {
        let mut small = Echelon::<i64>::new();
        let ok = rows.clone().into_iter().all(|r| small.insert(normalize(r)).is_ok());
        if ok {
            return Lattice { inner: Inner::Small(small) };
        }
        let mut big = Echelon::<BigInt>::new();
        for r in rows {
            if big.insert(lift(&normalize(r))).is_err() {
                unreachable!("big integer arithmetic does not overflow");
            }
        }
        Lattice { inner: Inner::Big(big) }
    }

    pub fn rank(&self) -> usize {
        match &self.inner {
            Inner::Small(e) => e.pivots.len(),
            Inner::Big(e) => e.pivots.len(),
        }
    }

    /// Basis rows, converted back to `i64`.
    pub fn basis(&self) -> Vec<SparseRow> {
        match &self.inner {
            Inner::Small(e) => e.pivots.values().cloned().collect(),
            Inner::Big(e) => e
                .pivots
                .values()
                .map(|r| r.iter().map(|(c, v)| (*c, Scalar::to_i64(v).expect("basis entry fits i64"))).collect())
                .collect(),
        }
    }

    pub fn contains(&self, x: &SparseRow) -> bool {
        let x = normalize(x);
        match &self.inner {
            Inner::Small(e) => match e.reduce(x.clone(), true) {
                Ok(r) => r.is_some_and(|r| r.is_empty()),
                Err(Overflow) => big_of(e).reduce(lift(&x), true).ok().flatten().is_some_and(|r| r.is_empty()),
            },
            Inner::Big(e) => e.reduce(lift(&x), true).ok().flatten().is_some_and(|r| r.is_empty()),
        }
    }

    /// Canonical representative of `x` modulo the lattice.
    pub fn reduce(&self, x: &SparseRow) -> SparseRow {
        let x = normalize(x);
        let back = |r: Row<BigInt>| -> SparseRow {
            r.into_iter().map(|(c, v)| (c, Scalar::to_i64(&v).expect("normal form entry fits i64"))).collect()
        };
        match &self.inner {
            Inner::Small(e) => match e.reduce(x.clone(), false) {
                Ok(r) => r.expect("non-exact reduction always succeeds"),
                Err(Overflow) => back(big_of(e).reduce(lift(&x), false).ok().flatten().unwrap()),
            },
            Inner::Big(e) => back(e.reduce(lift(&x), false).ok().flatten().unwrap()),
        }
    }
}

fn big_of(e: &Echelon<i64>) -> Echelon<BigInt> {
    Echelon { pivots: e.pivots.iter().map(|(c, r)| (*c, lift(r))).collect() }
}

/// Sort by column and merge duplicates.
pub fn normalize(r: &SparseRow) -> SparseRow {
    let mut m: BTreeMap<usize, i64> = BTreeMap::new();
    for &(c, v) in r {
        let e = m.entry(c).or_insert(0);
        *e = e.checked_add(v).expect("row entry overflow");
    }
    m.into_iter().filter(|(_, v)| *v != 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force oracle: search small integer combinations.
    fn in_span_brute(rows: &[SparseRow], x: &SparseRow, bound: i64) -> bool {
        let k = rows.len();
        let mut coef = vec![-bound; k];
        loop {
            let mut acc: SparseRow = Vec::new();
            for (r, c) in rows.iter().zip(&coef) {
                acc.extend(r.iter().map(|(col, v)| (*col, v * c)));
            }
            let diff: SparseRow = normalize(&acc.into_iter().chain(x.iter().map(|(c, v)| (*c, -v))).collect());
            if diff.is_empty() {
                return true;
            }
            let mut i = 0;
            while i < k && coef[i] == bound {
                coef[i] = -bound;
                i += 1;
            }
            if i == k {
                return false;
            }
            coef[i] += 1;
        }
    }

    #[test]
    fn gcd_combination_is_found() {
        let rows = vec![vec![(0, 4), (1, 1)], vec![(0, 6), (2, 1)]];
        let l = Lattice::from_rows(&rows);
        assert_eq!(l.rank(), 2);
        assert!(l.contains(&vec![(0, 2), (1, -1), (2, 1)]));
        assert!(!l.contains(&vec![(0, 2)]));
        assert!(l.contains(&vec![]));
    }

    #[test]
    fn reduction_prefers_later_columns() {
        // row says column 0 equals column 3
        let l = Lattice::from_rows(&vec![vec![(0, 1), (3, -1)]]);
        assert_eq!(l.reduce(&vec![(0, 5)]), vec![(3, 5)]);
        assert_eq!(l.reduce(&vec![(0, 2), (3, -2)]), vec![]);
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        let big = i64::MAX / 3;
        let rows = vec![vec![(0, big), (1, 1)], vec![(0, big - 1), (2, 7)], vec![(0, 5), (1, big)]];
        let l = Lattice::from_rows(&rows);
        assert!(l.contains(&vec![(0, 2 * big - 1), (1, 1), (2, 7)]));
        assert!(!l.contains(&vec![(1, 1)]));
    }

    proptest! {
        #[test]
        fn membership_matches_brute_force(
            rows in prop::collection::vec(prop::collection::vec((0usize..4, -3i64..=3), 1..4), 1..4),
            coef in prop::collection::vec(-2i64..=2, 4),
            noise in prop::collection::vec((0usize..4, -2i64..=2), 0..2),
        ) {
            let rows: Vec<SparseRow> = rows.iter().map(normalize).collect();
            let mut x: SparseRow = Vec::new();
            for (r, c) in rows.iter().zip(&coef) {
                x.extend(r.iter().map(|(col, v)| (*col, v * c)));
            }
            x.extend(noise.iter().cloned());
            let x = normalize(&x);
            let l = Lattice::from_rows(&rows);
            let brute = in_span_brute(&rows, &x, 6);
            if brute {
                prop_assert!(l.contains(&x));
            }
            if l.contains(&x) {
                // the reduced form of a member is zero
                prop_assert!(l.reduce(&x).is_empty());
            }
            if noise.is_empty() {
                prop_assert!(l.contains(&x));
            }
        }

        #[test]
        fn reduce_is_canonical_on_cosets(
            rows in prop::collection::vec(prop::collection::vec((0usize..5, -3i64..=3), 1..4), 1..4),
            x in prop::collection::vec((0usize..5, -4i64..=4), 0..5),
            coef in prop::collection::vec(-3i64..=3, 4),
        ) {
            let rows: Vec<SparseRow> = rows.iter().map(normalize).collect();
            let l = Lattice::from_rows(&rows);
            let mut y = x.clone();
            for (r, c) in rows.iter().zip(&coef) {
                y.extend(r.iter().map(|(col, v)| (*col, v * c)));
            }
            prop_assert_eq!(l.reduce(&normalize(&x)), l.reduce(&normalize(&y)));
        }
    }
}
