//! The type D structure of a tangle: states over all resolutions and inside
//! matchings, and the structure map built from APS smoothing changes, right
//! bridges, right sign changes, left bridges and left sign changes.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{sign_string, Algebra, Bigrading, Element, EdgeId, VertexId};
use crate::error::{Error, Result};
use crate::planar::Side;
use crate::tangle::{ArcRole, Resolution, Tangle};
use crate::typed::{algebra, Generator, Morphism, TypeD};

/// A generator: resolution (bit per crossing in file order), signs of the
/// free circles (bit set for `+`), and the boundary idempotent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub rho: u64,
    pub free: u64,
    pub vertex: VertexId,
}

pub struct Complex {
    pub tangle: Tangle,
    pub alg: Arc<Algebra>,
    pub resolutions: Vec<Resolution>,
    pub states: Vec<State>,
    index: HashMap<State, usize>,
    pub structure: TypeD,
    /// Gradings omit the orientation shift.
    pub relative: bool,
}

/// One summand of the structure map.
#[derive(Clone, Debug)]
pub struct Term {
    pub source: usize,
    pub target: usize,
    pub coeff: i64,
    /// Empty for an idempotent coefficient.
    pub edge: Option<EdgeId>,
}

impl Complex {
    pub fn build(tangle: &Tangle) -> Result<Complex> {
        Complex::build_with(tangle, algebra(tangle.n())?)
    }

    /// Build over a given algebra instance, e.g. one with a length guard.
    pub fn build_with(tangle: &Tangle, alg: Arc<Algebra>) -> Result<Complex> {
        if tangle.crossing_count() > 24 {
            return Err(Error::Invalid(format!("{} crossings is beyond the supported 24", tangle.crossing_count())));
        }
        if alg.n() != tangle.n() {
            return Err(Error::Invalid(format!("algebra has n = {}, tangle has n = {}", alg.n(), tangle.n())));
        }
        let q = &alg.quiver;
        let c = tangle.crossing_count();
        let resolutions: Vec<Resolution> = (0..1u64 << c).into_par_iter().map(|r| tangle.resolve(r)).collect();
        let (np, nm) = tangle.orientation().unwrap_or((0, 0));
        let mut masks: Vec<u64> = (0..1u64 << c).collect();
        masks.sort_by_key(|&r| (0..c).map(|k| r >> k & 1).collect::<Vec<_>>());
        let mut states = Vec::new();
        let mut gens = Vec::new();
        for &rho in &masks {
            let res = &resolutions[rho as usize];
            let nf = res.free_count();
            let hr = rho.count_ones() as i32;
            for m in &q.matchings {
                let link = crate::planar::CleavedLink::new(m.clone(), res.right.clone())?;
                let li = q.link_id(&link).expect("every cleaved link is a quiver vertex");
                let ncl = q.links[li].circles.len();
                let mut combos: Vec<(String, u64, u64)> = Vec::new();
                for cs in 0..1u64 << ncl {
                    for fs in 0..1u64 << nf {
                        combos.push((sign_string(cs, ncl) + &sign_string(fs, nf), cs, fs));
                    }
                }
                combos.sort();
                for (_, cs, fs) in combos {
                    let vertex = q.vertex(li, cs).expect("decorated vertex");
                    let plus_f = fs.count_ones() as i32;
                    let plus_c = cs.count_ones() as i32;
                    let q2 = 2 * hr + 2 * (2 * plus_f - nf as i32) + (2 * plus_c - ncl as i32) + 2 * (np as i32 - 2 * nm as i32);
                    let st = State { rho, free: fs, vertex };
                    gens.push(Generator {
                        idem: vertex,
                        grading: Bigrading::new(hr - nm as i32, q2),
                        label: format!(
                            "({},{},{}|{})",
                            tangle.rho_word(rho),
                            m,
                            sign_string(cs, ncl),
                            sign_string(fs, nf)
                        ),
                    });
                    states.push(st);
                }
            }
        }
        let index: HashMap<State, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut cx = Complex {
            tangle: tangle.clone(),
            alg: alg.clone(),
            resolutions,
            states,
            index,
            structure: TypeD::new(alg.clone(), gens),
            relative: tangle.orientation().is_none(),
        };
        let terms: Vec<Result<Vec<Term>>> = (0..cx.states.len()).into_par_iter().map(|i| cx.terms(i)).collect();
        let mut rows: Vec<BTreeMap<usize, Element>> = vec![BTreeMap::new(); cx.states.len()];
        for ts in terms {
            for t in ts? {
                let (s, w) = (cx.structure.gens[t.source].idem, cx.structure.gens[t.target].idem);
                let x = match t.edge {
                    None => Element::idempotent(s).scale(t.coeff),
                    Some(e) => Element::edge(&alg.quiver, e).scale(t.coeff),
                };
                rows[t.source].entry(t.target).or_insert_with(|| Element::zero(s, w)).add_scaled(1, &x);
            }
        }
        for (i, row) in rows.into_iter().enumerate() {
            for (j, x) in row {
                cx.structure.set(i, j, x);
            }
        }
        Ok(cx)
    }

    pub fn state_index(&self, s: &State) -> Option<usize> {
        self.index.get(s).copied()
    }

    fn find(&self, s: State) -> Result<usize> {
        self.state_index(&s)
            .ok_or_else(|| Error::Invalid(format!("no generator for resolution {:b}, free {:b}, vertex {}", s.rho, s.free, s.vertex)))
    }

    /// Every term of the structure map out of generator `i`, each checked
    /// against the grading rule.
    pub fn terms(&self, i: usize) -> Result<Vec<Term>> {
        let q = &self.alg.quiver;
        let t = &self.tangle;
        let st = self.states[i];
        let res = &self.resolutions[st.rho as usize];
        let h = self.structure.gens[i].grading.h;
        let left_sign = if h.rem_euclid(2) == 0 { 1 } else { -1 };
        let rank = t.rank();
        let mut out = Vec::new();
        let mut push = |target: State, coeff: i64, edge: Option<EdgeId>| -> Result<()> {
            let j = self.find(target)?;
            out.push(Term { source: i, target: j, coeff, edge });
            Ok(())
        };
        let link = q.link_of(st.vertex);
        for a in &res.active {
            let k = a.crossing;
            let after = (0..t.crossing_count()).filter(|&c| rank[c] > rank[k] && st.rho >> c & 1 == 1).count();
            let sign = if after % 2 == 0 { 1 } else { -1 };
            let rho2 = st.rho | 1 << k;
            let res2 = &self.resolutions[rho2 as usize];
            let slots = t.slot_edges(k);
            let reps = res.free_edges();
            // signs of free circles away from the arc, carried to res2
            let carry = |skip: &[usize]| -> u64 {
                let mut m = 0;
                for (f, &e) in reps.iter().enumerate() {
                    if skip.contains(&f) {
                        continue;
                    }
                    if st.free >> f & 1 == 1 {
                        m |= 1 << res2.free_of_edge(e).expect("untouched free circle survives");
                    }
                }
                m
            };
            let plus = |f: usize| st.free >> f & 1 == 1;
            match res.role(a) {
                ArcRole::FreeFree => {
                    let fx = res.free_of_edge(slots[0]).unwrap();
                    let fy = res.free_of_edge(slots[2]).unwrap();
                    if fx == fy {
                        let base = carry(&[fx]);
                        let z1 = res2.free_of_edge(slots[0]).unwrap();
                        let z2 = res2.free_of_edge(slots[1]).unwrap();
                        if plus(fx) {
                            push(State { rho: rho2, free: base | 1 << z1, vertex: st.vertex }, sign, None)?;
                            push(State { rho: rho2, free: base | 1 << z2, vertex: st.vertex }, sign, None)?;
                        } else {
                            push(State { rho: rho2, free: base, vertex: st.vertex }, sign, None)?;
                        }
                    } else {
                        let base = carry(&[fx, fy]);
                        let z = res2.free_of_edge(slots[0]).unwrap();
                        match (plus(fx), plus(fy)) {
                            (true, true) => push(State { rho: rho2, free: base | 1 << z, vertex: st.vertex }, sign, None)?,
                            (false, false) => {}
                            _ => push(State { rho: rho2, free: base, vertex: st.vertex }, sign, None)?,
                        }
                    }
                }
                ArcRole::ArcFree { arc, free } => {
                    let base = carry(&[free]);
                    let circle = link.link.circle_index(arc);
                    if plus(free) {
                        push(State { rho: rho2, free: base, vertex: st.vertex }, sign, None)?;
                    } else if q.sign(st.vertex, circle) {
                        let e = q.dec_edge(st.vertex, circle, Side::Right).expect("right sign change on a + circle");
                        push(State { rho: rho2, free: base, vertex: q.edges[e].target }, sign, Some(e))?;
                    }
                }
                ArcRole::SameArc { arc } => {
                    let base = carry(&[]);
                    let d = res2
                        .free_of_edge(slots[0])
                        .or_else(|| res2.free_of_edge(slots[1]))
                        .expect("splitting an arc makes a free circle");
                    push(State { rho: rho2, free: base, vertex: st.vertex }, sign, None)?;
                    let circle = link.link.circle_index(arc);
                    if q.sign(st.vertex, circle) {
                        let e = q.dec_edge(st.vertex, circle, Side::Right).expect("right sign change on a + circle");
                        push(State { rho: rho2, free: base | 1 << d, vertex: q.edges[e].target }, sign, Some(e))?;
                    }
                }
                ArcRole::Bridge(g) => {
                    let base = carry(&[]);
                    for e in q.bridge_edges(st.vertex, &g) {
                        let w = q.edges[e].target;
                        if q.link_of(w).link.right != res2.right {
                            return Err(Error::Invalid(format!("bridge {g} does not reach the resolution {:b}", rho2)));
                        }
                        push(State { rho: rho2, free: base, vertex: w }, sign, Some(e))?;
                    }
                }
            }
        }
        for g in link.link.left.bridges(Side::Left) {
            for e in q.bridge_edges(st.vertex, &g) {
                push(State { vertex: q.edges[e].target, ..st }, left_sign, Some(e))?;
            }
        }
        for circle in 0..link.circles.len() {
            if q.sign(st.vertex, circle) {
                let e = q.dec_edge(st.vertex, circle, Side::Left).expect("left sign change on a + circle");
                push(State { vertex: q.edges[e].target, ..st }, left_sign, Some(e))?;
            }
        }
        for term in &out {
            self.check_term(term)?;
        }
        Ok(out)
    }

    /// The grading rule `gr(coeff) = gr(source) - gr(target) + (1,0)`.
    pub fn check_term(&self, term: &Term) -> Result<()> {
        let g = &self.structure.gens;
        let have = term.edge.map_or(Bigrading::ZERO, |e| self.alg.quiver.edges[e].grading());
        let want = g[term.source].grading - g[term.target].grading + Bigrading::DELTA;
        if have != want {
            let what = term.edge.map_or("I".to_string(), |e| self.alg.quiver.edge_label(e));
            return Err(Error::Grading(format!(
                "{what} from {} to {}: coefficient has {have}, expected {want}",
                g[term.source].label, g[term.target].label
            )));
        }
        Ok(())
    }

    /// Generators with the given label.
    pub fn generator(&self, label: &str) -> Option<usize> {
        self.structure.gens.iter().position(|g| g.label == label)
    }
}

/// The diagonal map between the structures of two orderings of the same
/// diagram: each generator goes to itself with the sign of the ordering
/// change restricted to its 1-resolved crossings.
pub fn psi(a: &Complex, b: &Complex) -> Result<Morphism> {
    if a.states != b.states {
        return Err(Error::Invalid("complexes are not built from the same diagram".into()));
    }
    let (ra, rb) = (a.tangle.rank(), b.tangle.rank());
    let mut m = Morphism::new(a.states.len(), b.states.len());
    for (i, s) in a.states.iter().enumerate() {
        let ones: Vec<usize> = (0..a.tangle.crossing_count()).filter(|&c| s.rho >> c & 1 == 1).collect();
        let mut inv = 0;
        for x in 0..ones.len() {
            for y in x + 1..ones.len() {
                let (c, d) = (ones[x], ones[y]);
                if (ra[c] < ra[d]) != (rb[c] < rb[d]) {
                    inv += 1;
                }
            }
        }
        let idem = a.structure.gens[i].idem;
        m.set(i, i, Element::idempotent(idem).scale(if inv % 2 == 0 { 1 } else { -1 }));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangle::Builder;

    fn trefoil() -> Tangle {
        let mut b = Builder::with_flow(&[true, false]);
        b.cup(0, false);
        for _ in 0..3 {
            b.cross(1, true);
        }
        b.cap(0).unwrap();
        b.cap(0).unwrap();
        b.finish(None).unwrap()
    }

    #[test]
    fn trefoil_census_and_identity() {
        let cx = Complex::build(&trefoil()).unwrap();
        // 8 + 3*4 + 3*4 + 4... counted directly from free circles
        let want: usize = (0..8u64).map(|r| 2 * (1 << cx.resolutions[r as usize].free_count())).sum();
        assert_eq!(cx.states.len(), want);
        assert_eq!(cx.states.len(), 30);
        assert!(cx.structure.verify().unwrap().is_empty());
        let g = cx.generator("(000,1-2,+|--)").unwrap();
        assert_eq!(cx.structure.gens[g].grading, Bigrading::new(-3, -15));
    }

    #[test]
    fn aps_part_squares_to_zero() {
        let cx = Complex::build(&trefoil()).unwrap();
        let d = &cx.structure;
        for i in 0..d.dim() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for (&j, a) in d.row(i) {
                let Some(u) = a.unit_multiple() else { continue };
                for (&k, b) in d.row(j) {
                    if let Some(v) = b.unit_multiple() {
                        *acc.entry(k).or_insert(0) += u * v;
                    }
                }
            }
            assert!(acc.values().all(|&v| v == 0), "generator {i}");
        }
    }

    #[test]
    fn psi_intertwines_orderings() {
        let t = trefoil();
        let a = Complex::build(&t).unwrap();
        let b = Complex::build(&t.reorder(&[1, 0, 2]).unwrap()).unwrap();
        let p = psi(&a, &b).unwrap();
        assert!(p.verify(&a.structure, &b.structure).unwrap().is_empty());
        let s = a.states.iter().position(|s| s.rho == 0b011).unwrap();
        assert_eq!(p.get(s, s).unwrap().unit_multiple(), Some(-1));
        // the unsigned identity is not a morphism between the two
        let id = a.structure.identity_morphism();
        assert!(!id.verify(&a.structure, &b.structure).unwrap().is_empty());
    }
}
