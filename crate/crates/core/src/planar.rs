//! Crossingless matchings of points on the vertical axis, their faces and
//! bridges, and cleaved links made from a left and a right matching.
//!
//! Points are numbered `1..=2n` from bottom to top. An arc is named by its
//! lower endpoint. Face `0` is the unbounded face of a half-plane; any other
//! face is named after the arc that encloses it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn tag(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }

    /// Homological parity of generators living on this side.
    pub fn parity(self) -> i32 {
        match self {
            Side::Left => 1,
            Side::Right => 0,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Arc {
    pub lo: usize,
    pub hi: usize,
}

impl Arc {
    pub fn id(&self) -> usize {
        self.lo
    }

    pub fn contains(&self, other: &Arc) -> bool {
        self.lo < other.lo && other.hi < self.hi
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Matching {
    partner: Vec<usize>,
}

impl Matching {
    /// `partner[p - 1]` is the point matched with `p`.
    pub fn new(partner: Vec<usize>) -> Result<Self> {
        let len = partner.len();
        if !len.is_multiple_of(2) {
            return Err(Error::InvalidMatching(format!("odd number of points {len}")));
        }
        for (i, &q) in partner.iter().enumerate() {
            let p = i + 1;
            if q < 1 || q > len {
                return Err(Error::InvalidMatching(format!("point {p} matched to {q}")));
            }
            if q == p || partner[q - 1] != p {
                return Err(Error::InvalidMatching(format!("point {p} is not paired")));
            }
        }
        let m = Matching { partner };
        let arcs = m.arcs();
        for x in &arcs {
            for y in &arcs {
                if x.lo < y.lo && y.lo < x.hi && x.hi < y.hi {
                    return Err(Error::InvalidMatching(format!(
                        "arcs {}-{} and {}-{} cross",
                        x.lo, x.hi, y.lo, y.hi
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let mut partner = vec![0; 2 * pairs.len()];
        for &(a, b) in pairs {
            if a < 1 || b < 1 || a > partner.len() || b > partner.len() {
                return Err(Error::InvalidMatching(format!("pair {a}-{b} out of range")));
            }
            if partner[a - 1] != 0 || partner[b - 1] != 0 {
                return Err(Error::InvalidMatching(format!("pair {a}-{b} reuses a point")));
            }
            partner[a - 1] = b;
            partner[b - 1] = a;
        }
        Matching::new(partner)
    }

    /// Number of arcs.
    pub fn n(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn points(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, p: usize) -> usize {
        self.partner[p - 1]
    }

    pub fn partners(&self) -> &[usize] {
        &self.partner
    }

    pub fn arc_of(&self, p: usize) -> Arc {
        let q = self.partner(p);
        Arc { lo: p.min(q), hi: p.max(q) }
    }

    pub fn arcs(&self) -> Vec<Arc> {
        (1..=self.points())
            .filter(|&p| self.partner(p) > p)
            .map(|p| Arc { lo: p, hi: self.partner(p) })
            .collect()
    }

    fn arc(&self, id: usize) -> Result<Arc> {
        if id < 1 || id > self.points() || self.partner(id) < id {
            return Err(Error::NotABridge(format!("no arc named {id} in {self}")));
        }
        Ok(Arc { lo: id, hi: self.partner(id) })
    }

    /// Face on the outer side of an arc: its parent arc, or `0`.
    pub fn parent(&self, id: usize) -> usize {
        let a = self.arc_of(id);
        self.arcs()
            .into_iter()
            .filter(|b| b.contains(&a))
            .max_by_key(|b| b.lo)
            .map_or(0, |b| b.lo)
    }

    pub fn face_ids(&self) -> Vec<usize> {
        std::iter::once(0).chain(self.arcs().iter().map(|a| a.lo)).collect()
    }

    /// Arcs on the boundary of a face, in cyclic order around it.
    pub fn face_boundary(&self, face: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .arcs()
            .iter()
            .filter(|a| self.parent(a.lo) == face)
            .map(|a| a.lo)
            .collect();
        if face != 0 {
            out.push(face);
        }
        out
    }

    /// The unique face whose boundary meets both arcs, if any.
    pub fn shared_face(&self, a: usize, b: usize) -> Option<usize> {
        if a == b {
            return None;
        }
        let (pa, pb) = (self.parent(a), self.parent(b));
        if pa == pb {
            Some(pa)
        } else if pb == a {
            Some(a)
        } else if pa == b {
            Some(b)
        } else {
            None
        }
    }

    /// Re-pair the four endpoints of two arcs sharing a face.
    pub fn surgery(&self, a: usize, b: usize) -> Result<Matching> {
        if self.shared_face(a, b).is_none() {
            return Err(Error::NotABridge(format!("arcs {a} and {b} share no face in {self}")));
        }
        let (x, y) = {
            let (x, y) = (self.arc(a)?, self.arc(b)?);
            if x.lo < y.lo { (x, y) } else { (y, x) }
        };
        let mut partner = self.partner.clone();
        let mut join = |p: usize, q: usize| {
            partner[p - 1] = q;
            partner[q - 1] = p;
        };
        if x.hi < y.lo {
            join(x.lo, y.hi);
            join(x.hi, y.lo);
        } else {
            join(x.lo, y.lo);
            join(y.hi, x.hi);
        }
        Matching::new(partner)
    }

    pub fn bridges(&self, side: Side) -> Vec<BridgeClass> {
        let mut out = Vec::new();
        for face in self.face_ids() {
            let mut arcs = self.face_boundary(face);
            arcs.sort_unstable();
            for i in 0..arcs.len() {
                for j in i + 1..arcs.len() {
                    out.push(BridgeClass { side, face, a: arcs[i], b: arcs[j] });
                }
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.arcs().iter().map(|a| format!("{}-{}", a.lo, a.hi)).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Matching {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            let (a, b) = part
                .split_once('-')
                .ok_or_else(|| Error::InvalidMatching(format!("bad arc {part:?}")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidMatching(format!("bad point {t:?}")))
            };
            pairs.push((parse(a)?, parse(b)?));
        }
        Matching::from_pairs(&pairs)
    }
}

/// All crossingless matchings on `2n` points, sorted by partner sequence.
pub fn enumerate_matchings(n: usize) -> Vec<Matching> {
    fn rec(lo: usize, hi: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, rest: &mut Vec<(usize, usize)>) {
        // fill the interval [lo, hi] then continue with pending intervals
        if lo > hi {
            match rest.pop() {
                Some((l, h)) => {
                    rec(l, h, acc, out, rest);
                    rest.push((l, h));
                }
                None => out.push(acc.clone()),
            }
            return;
        }
        let mut q = lo + 1;
        while q <= hi {
            acc[lo - 1] = q;
            acc[q - 1] = lo;
            rest.push((q + 1, hi));
            rec(lo + 1, q - 1, acc, out, rest);
            rest.pop();
            q += 2;
        }
    }
    let mut out = Vec::new();
    let mut acc = vec![0; 2 * n];
    rec(1, 2 * n, &mut acc, &mut out, &mut Vec::new());
    let mut ms: Vec<Matching> = out.into_iter().map(|p| Matching { partner: p }).collect();
    ms.sort();
    ms
}

/// A bridge up to isotopy: the face it lies in and the two arcs it joins.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct BridgeClass {
    pub side: Side,
    pub face: usize,
    pub a: usize,
    pub b: usize,
}

impl BridgeClass {
    pub fn new(side: Side, face: usize, a: usize, b: usize) -> Self {
        BridgeClass { side, face, a: a.min(b), b: a.max(b) }
    }

    pub fn arcs(&self) -> [usize; 2] {
        [self.a, self.b]
    }
}

impl fmt::Display for BridgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{},{})", self.side.tag(), self.face, self.a, self.b)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum PairClass {
    /// Bridges that cannot be made disjoint.
    Perp,
    /// Disjoint arc pairs, or bridges on different sides.
    Disjoint,
    /// One shared arc, approached from the same face.
    SameSide,
    /// One shared arc, approached from opposite faces.
    OppositeSide,
}

impl PairClass {
    pub fn tag(self) -> &'static str {
        match self {
            PairClass::Perp => "perp",
            PairClass::Disjoint => "d",
            PairClass::SameSide => "s",
            PairClass::OppositeSide => "o",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Circle {
    /// Smallest boundary point on the circle.
    pub id: usize,
    pub points: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BridgeAction {
    Merge { c1: usize, c2: usize },
    Fission { c: usize },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CleavedLink {
    pub left: Matching,
    pub right: Matching,
}

impl CleavedLink {
    pub fn new(left: Matching, right: Matching) -> Result<Self> {
        if left.points() != right.points() {
            return Err(Error::InvalidMatching(format!(
                "left has {} points, right has {}",
                left.points(),
                right.points()
            )));
        }
        Ok(CleavedLink { left, right })
    }

    pub fn n(&self) -> usize {
        self.left.n()
    }

    pub fn matching(&self, side: Side) -> &Matching {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Circles sorted by id.
    pub fn circles(&self) -> Vec<Circle> {
        let len = self.left.points();
        let mut seen = vec![false; len + 1];
        let mut out = Vec::new();
        for start in 1..=len {
            if seen[start] {
                continue;
            }
            let mut points = Vec::new();
            let mut p = start;
            loop {
                seen[p] = true;
                points.push(p);
                let q = self.left.partner(p);
                seen[q] = true;
                points.push(q);
                p = self.right.partner(q);
                if p == start {
                    break;
                }
            }
            points.sort_unstable();
            out.push(Circle { id: start, points });
        }
        out
    }

    /// Index (in id order) of the circle through a point.
    pub fn circle_index(&self, p: usize) -> usize {
        self.circles().iter().position(|c| c.points.contains(&p)).expect("point on a circle")
    }

    pub fn bridges(&self) -> Vec<BridgeClass> {
        let mut out = self.left.bridges(Side::Left);
        out.extend(self.right.bridges(Side::Right));
        out
    }

    pub fn check_bridge(&self, g: &BridgeClass) -> Result<()> {
        let m = self.matching(g.side);
        match m.shared_face(g.a, g.b) {
            Some(f) if f == g.face => Ok(()),
            _ => Err(Error::NotABridge(format!("{g} in {self}"))),
        }
    }

    pub fn surgery(&self, g: &BridgeClass) -> Result<CleavedLink> {
        self.check_bridge(g)?;
        let m = self.matching(g.side).surgery(g.a, g.b)?;
        Ok(match g.side {
            Side::Left => CleavedLink { left: m, right: self.right.clone() },
            Side::Right => CleavedLink { left: self.left.clone(), right: m },
        })
    }

    /// The bridge in the surgered link that undoes the surgery.
    pub fn dual(&self, g: &BridgeClass) -> Result<BridgeClass> {
        let after = self.surgery(g)?;
        let m = after.matching(g.side);
        let old = self.matching(g.side);
        let new_arcs: Vec<usize> =
            m.arcs().iter().filter(|a| !old.arcs().contains(a)).map(|a| a.lo).collect();
        let (a, b) = (new_arcs[0], new_arcs[1]);
        let face = m.shared_face(a, b).expect("dual arcs share a face");
        Ok(BridgeClass::new(g.side, face, a, b))
    }

    /// Circle indices touched by the bridge feet.
    pub fn action(&self, g: &BridgeClass) -> Result<BridgeAction> {
        self.check_bridge(g)?;
        let c1 = self.circle_index(g.a);
        let c2 = self.circle_index(g.b);
        Ok(if c1 == c2 {
            BridgeAction::Fission { c: c1 }
        } else {
            BridgeAction::Merge { c1: c1.min(c2), c2: c1.max(c2) }
        })
    }

    pub fn classify_pair(&self, g: &BridgeClass, h: &BridgeClass) -> Result<PairClass> {
        self.check_bridge(g)?;
        self.check_bridge(h)?;
        if g == h {
            return Err(Error::SameBridge(format!("{g}")));
        }
        if g.side != h.side {
            return Ok(PairClass::Disjoint);
        }
        let shared = g.arcs().iter().filter(|x| h.arcs().contains(x)).count();
        Ok(match shared {
            0 => {
                if g.face == h.face {
                    let cyc = self.matching(g.side).face_boundary(g.face);
                    let pos = |x: usize| cyc.iter().position(|&y| y == x).unwrap();
                    let (lo, hi) = {
                        let (p, q) = (pos(g.a), pos(g.b));
                        (p.min(q), p.max(q))
                    };
                    let inside = |x: usize| lo < pos(x) && pos(x) < hi;
                    if inside(h.a) != inside(h.b) {
                        PairClass::Perp
                    } else {
                        PairClass::Disjoint
                    }
                } else {
                    PairClass::Disjoint
                }
            }
            1 if g.face == h.face => PairClass::SameSide,
            1 => PairClass::OppositeSide,
            _ => unreachable!("two bridges with the same arcs share their face"),
        })
    }

    /// Classes that `h` can become in the link surgered along `g`. One class
    /// for `d` and `s` pairs, two for `o` pairs.
    pub fn transport(&self, g: &BridgeClass, h: &BridgeClass) -> Result<Vec<BridgeClass>> {
        let class = self.classify_pair(g, h)?;
        if class == PairClass::Perp {
            return Err(Error::Perpendicular(format!("{g} and {h} in {self}")));
        }
        let after = self.surgery(g)?;
        if g.side != h.side {
            return Ok(vec![*h]);
        }
        let old = self.matching(g.side);
        let m = after.matching(g.side);
        let new_arcs: Vec<usize> =
            m.arcs().iter().filter(|a| !old.arcs().contains(a)).map(|a| a.lo).collect();
        let options = |x: usize| -> Vec<usize> {
            if x == g.a || x == g.b {
                new_arcs.clone()
            } else {
                vec![x]
            }
        };
        let mut out = Vec::new();
        for &x in &options(h.a) {
            for &y in &options(h.b) {
                if let Some(face) = m.shared_face(x, y) {
                    let c = BridgeClass::new(h.side, face, x, y);
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
        }
        out.sort();
        let expected = if class == PairClass::OppositeSide { 2 } else { 1 };
        debug_assert_eq!(out.len(), expected, "transport of {h} along {g} in {self}");
        Ok(out)
    }
}

impl fmt::Display for CleavedLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.left, self.right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force_matchings(n: usize) -> Vec<Vec<usize>> {
        // every fixed-point-free involution, then drop crossing ones
        fn rec(p: Vec<usize>, out: &mut Vec<Vec<usize>>) {
            match p.iter().position(|&x| x == 0) {
                None => out.push(p),
                Some(i) => {
                    for j in i + 1..p.len() {
                        if p[j] == 0 {
                            let mut q = p.clone();
                            q[i] = j + 1;
                            q[j] = i + 1;
                            rec(q, out);
                        }
                    }
                }
            }
        }
        let mut all = Vec::new();
        rec(vec![0; 2 * n], &mut all);
        all.retain(|p| {
            (0..p.len()).all(|i| {
                (0..p.len()).all(|j| {
                    let (a, b, c, d) = (i + 1, p[i], j + 1, p[j]);
                    !(a < c && c < b && b < d)
                })
            })
        });
        all.sort();
        all
    }

    fn m(s: &str) -> Matching {
        s.parse().unwrap()
    }

    #[test]
    fn catalan_counts_match_brute_force() {
        for n in 0..=5 {
            let ours: Vec<Vec<usize>> =
                enumerate_matchings(n).iter().map(|m| m.partners().to_vec()).collect();
            assert_eq!(ours, brute_force_matchings(n), "n = {n}");
        }
        assert_eq!(enumerate_matchings(1).len(), 1);
        assert_eq!(enumerate_matchings(2).len(), 2);
        assert_eq!(enumerate_matchings(3).len(), 5);
    }

    #[test]
    fn matching_round_trips_through_text() {
        for n in 0..=4 {
            for x in enumerate_matchings(n) {
                assert_eq!(x.to_string().parse::<Matching>().unwrap(), x);
            }
        }
        assert!("1-3,2-4".parse::<Matching>().is_err());
        assert!("1-2,2-3".parse::<Matching>().is_err());
    }

    #[test]
    fn bridge_counts_for_small_matchings() {
        assert_eq!(m("1-2").bridges(Side::Right).len(), 0);
        assert_eq!(m("1-2,3-4").bridges(Side::Right).len(), 1);
        assert_eq!(m("1-4,2-3").bridges(Side::Right).len(), 1);
        assert_eq!(m("1-2,3-4,5-6").bridges(Side::Right).len(), 3);
        assert_eq!(m("1-6,2-3,4-5").bridges(Side::Right).len(), 3);
    }

    #[test]
    fn surgery_swaps_the_two_matchings_on_four_points() {
        let (m1, m2) = (m("1-2,3-4"), m("1-4,2-3"));
        assert_eq!(m1.surgery(1, 3).unwrap(), m2);
        assert_eq!(m2.surgery(1, 2).unwrap(), m1);
        assert!(m("1-2,3-6,4-5").surgery(1, 4).is_err());
    }

    #[test]
    fn circles_of_small_links() {
        let l = CleavedLink::new(m("1-2,3-4"), m("1-2,3-4")).unwrap();
        assert_eq!(l.circles().len(), 2);
        let l = CleavedLink::new(m("1-2,3-4"), m("1-4,2-3")).unwrap();
        assert_eq!(l.circles().len(), 1);
        assert_eq!(l.circles()[0].points, vec![1, 2, 3, 4]);
    }

    #[test]
    fn triple_of_sibling_arcs_is_pairwise_same_side() {
        let l = CleavedLink::new(m("1-2,3-4,5-6"), m("1-6,2-3,4-5")).unwrap();
        let bs = l.left.bridges(Side::Left);
        assert_eq!(bs.len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(l.classify_pair(&bs[i], &bs[j]).unwrap(), PairClass::SameSide);
                }
            }
        }
        // all three routes through two surgeries end at the same link
        let ends: Vec<CleavedLink> = (0..3)
            .map(|i| {
                let j = (i + 1) % 3;
                let lifted = l.transport(&bs[i], &bs[j]).unwrap();
                l.surgery(&bs[i]).unwrap().surgery(&lifted[0]).unwrap()
            })
            .collect();
        assert!(ends.iter().all(|e| *e == ends[0]));
    }

    #[test]
    fn interleaved_bridges_are_perpendicular() {
        // outer face of four sibling arcs: 1-3 crosses 2-4 in the boundary cycle
        let mm = m("1-2,3-4,5-6,7-8");
        let l = CleavedLink::new(mm.clone(), mm).unwrap();
        let g = BridgeClass::new(Side::Left, 0, 1, 5);
        let h = BridgeClass::new(Side::Left, 0, 3, 7);
        let k = BridgeClass::new(Side::Left, 0, 3, 5);
        assert_eq!(l.classify_pair(&g, &h).unwrap(), PairClass::Perp);
        assert!(l.transport(&g, &h).is_err());
        let far = BridgeClass::new(Side::Left, 0, 5, 7);
        let near = BridgeClass::new(Side::Left, 0, 1, 3);
        assert_eq!(l.classify_pair(&far, &near).unwrap(), PairClass::Disjoint);
        assert_eq!(l.classify_pair(&g, &k).unwrap(), PairClass::SameSide);
    }

    /// Independent face oracle: two arcs bound a common face exactly when
    /// no third arc separates them.
    fn share_face_oracle(mm: &Matching, a: usize, b: usize) -> bool {
        let arcs = mm.arcs();
        let (x, y) = (mm.arc_of(a), mm.arc_of(b));
        if x == y {
            return false;
        }
        !arcs.iter().any(|z| *z != x && *z != y && (z.contains(&x) != z.contains(&y)))
            && !(x.contains(&y) && arcs.iter().any(|z| x.contains(z) && z.contains(&y)))
            && !(y.contains(&x) && arcs.iter().any(|z| y.contains(z) && z.contains(&x)))
    }

    fn any_link(max_n: usize) -> impl Strategy<Value = CleavedLink> {
        (1..=max_n).prop_flat_map(|n| {
            let all = enumerate_matchings(n);
            let k = all.len();
            (0..k, 0..k).prop_map(move |(i, j)| CleavedLink::new(all[i].clone(), all[j].clone()).unwrap())
        })
    }

    fn any_matching(max_n: usize) -> impl Strategy<Value = Matching> {
        (1..=max_n).prop_flat_map(|n| {
            let all = enumerate_matchings(n);
            (0..all.len()).prop_map(move |i| all[i].clone())
        })
    }

    proptest! {
        #[test]
        fn faces_number_n_plus_one(mm in any_matching(6)) {
            prop_assert_eq!(mm.face_ids().len(), mm.n() + 1);
            let total: usize = mm.face_ids().iter().map(|&f| mm.face_boundary(f).len()).sum();
            prop_assert_eq!(total, 2 * mm.n());
        }

        #[test]
        fn bridges_agree_with_face_oracle(mm in any_matching(6)) {
            let bs = mm.bridges(Side::Left);
            let mut count = 0;
            for x in mm.arcs() {
                for y in mm.arcs() {
                    if x.lo < y.lo && share_face_oracle(&mm, x.lo, y.lo) {
                        count += 1;
                        prop_assert!(bs.iter().any(|b| b.a == x.lo && b.b == y.lo));
                    }
                }
            }
            prop_assert_eq!(count, bs.len());
        }

        #[test]
        fn surgery_is_undone_by_dual(l in any_link(5)) {
            for g in l.bridges() {
                let after = l.surgery(&g).unwrap();
                let d = l.dual(&g).unwrap();
                prop_assert_eq!(after.surgery(&d).unwrap(), l.clone());
                prop_assert_eq!(after.dual(&d).unwrap(), g);
                // bridge surgery is unique among matchings differing in two arcs
                let old = l.matching(g.side);
                let new = after.matching(g.side);
                let moved = old.arcs().iter().filter(|a| !new.arcs().contains(a)).count();
                prop_assert_eq!(moved, 2);
            }
        }

        #[test]
        fn classification_is_symmetric(l in any_link(4)) {
            let bs = l.bridges();
            for g in &bs {
                for h in &bs {
                    if g != h {
                        prop_assert_eq!(l.classify_pair(g, h).unwrap(), l.classify_pair(h, g).unwrap());
                    }
                }
            }
        }

        #[test]
        fn transport_maps_match_pair_classes(l in any_link(5)) {
            let bs = l.bridges();
            for g in &bs {
                let after = l.surgery(g).unwrap();
                let gd = l.dual(g).unwrap();
                let mut d_images = Vec::new();
                let mut s_images = Vec::new();
                for h in bs.iter().filter(|h| *h != g) {
                    let class = l.classify_pair(g, h).unwrap();
                    if class == PairClass::Perp {
                        continue;
                    }
                    let img = l.transport(g, h).unwrap();
                    for i in &img {
                        after.check_bridge(i).unwrap();
                        let back = after.classify_pair(&gd, i).unwrap();
                        match class {
                            PairClass::Disjoint => prop_assert_eq!(back, PairClass::Disjoint),
                            PairClass::SameSide => prop_assert_eq!(back, PairClass::OppositeSide),
                            PairClass::OppositeSide => prop_assert_eq!(back, PairClass::SameSide),
                            PairClass::Perp => unreachable!(),
                        }
                    }
                    match class {
                        PairClass::Disjoint => d_images.push(img[0]),
                        PairClass::SameSide => s_images.push(img[0]),
                        _ => {}
                    }
                }
                // d bijects, s collapses two to one
                let mut dd = d_images.clone();
                dd.sort();
                dd.dedup();
                prop_assert_eq!(dd.len(), d_images.len());
                let mut ss = s_images.clone();
                ss.sort();
                ss.dedup();
                prop_assert_eq!(ss.len() * 2, s_images.len());
                let back_o = after
                    .bridges()
                    .into_iter()
                    .filter(|h| *h != gd && after.classify_pair(&gd, h).unwrap() == PairClass::OppositeSide)
                    .count();
                prop_assert_eq!(back_o, ss.len());
            }
        }
    }
}
