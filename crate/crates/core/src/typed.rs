//! Type D structures over the cleaved-link algebra, their morphisms and
//! homotopies, and reduction by cancelling unit coefficients.
//!
//! A structure on generators `x_i` is stored as its coefficient matrix:
//! `δ(x_i) = Σ_j a_ij ⊗ x_j`, with `a_ij` an element from the idempotent of
//! `x_i` to the idempotent of `x_j`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Algebra, Bigrading, Element, VertexId};
use crate::error::{Error, Result};

/// Shared algebra instances, one per boundary size.
pub fn algebra(n: usize) -> Result<Arc<Algebra>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Algebra>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(a) = cache.lock().unwrap().get(&n) {
        return Ok(a.clone());
    }
    let a = Arc::new(Algebra::new(n)?);
    Ok(cache.lock().unwrap().entry(n).or_insert(a).clone())
}

fn parity(h: i32) -> i64 {
    if h.rem_euclid(2) == 0 { 1 } else { -1 }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub idem: VertexId,
    pub grading: Bigrading,
    pub label: String,
}

#[derive(Clone)]
pub struct TypeD {
    pub alg: Arc<Algebra>,
    pub gens: Vec<Generator>,
    out: Vec<BTreeMap<usize, Element>>,
    inc: Vec<BTreeSet<usize>>,
}

impl TypeD {
    pub fn new(alg: Arc<Algebra>, gens: Vec<Generator>) -> TypeD {
        let k = gens.len();
        TypeD { alg, gens, out: vec![BTreeMap::new(); k], inc: vec![BTreeSet::new(); k] }
    }

    /// The same structure over another instance of its algebra.
    pub fn rebase(mut self, alg: Arc<Algebra>) -> TypeD {
        assert_eq!(alg.n(), self.alg.n(), "rebasing onto a different algebra");
        self.alg = alg;
        self
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Element {
        self.out[i]
            .get(&j)
            .cloned()
            .unwrap_or_else(|| Element::zero(self.gens[i].idem, self.gens[j].idem))
    }

    pub fn row(&self, i: usize) -> &BTreeMap<usize, Element> {
        &self.out[i]
    }

    pub fn column(&self, j: usize) -> &BTreeSet<usize> {
        &self.inc[j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Element) {
        assert_eq!((x.source, x.target), (self.gens[i].idem, self.gens[j].idem), "coefficient endpoints");
        if x.is_structurally_zero() {
            self.out[i].remove(&j);
            self.inc[j].remove(&i);
        } else {
            self.out[i].insert(j, x);
            self.inc[j].insert(i);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, c: i64, x: &Element) {
        let mut cur = self.get(i, j);
        cur.add_scaled(c, x);
        self.set(i, j, cur);
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Element)> {
        self.out.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, x)| (i, *j, x)))
    }

    pub fn entry_count(&self) -> usize {
        self.out.iter().map(|r| r.len()).sum()
    }

    /// Check `gr(a_ij) = gr(x_i) - gr(x_j) + (1,0)` for every entry.
    pub fn check_gradings(&self) -> Result<()> {
        let q = &self.alg.quiver;
        for (i, j, x) in self.entries() {
            let want = self.gens[i].grading - self.gens[j].grading + Bigrading::DELTA;
            match x.grading(q)? {
                Some(g) if g != want => {
                    return Err(Error::Grading(format!(
                        "a[{i}][{j}] = {} has grading {g}, expected {want}",
                        x.display(q)
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// The coefficient of `x_k` in `(μ⊗I)(I⊗δ)δ(x_i) + (d⊗|I|)δ(x_i)`.
    pub fn identity_coefficient(&self, i: usize, k: usize) -> Element {
        let mut acc = self.alg.differential(&self.get(i, k)).scale(parity(self.gens[k].grading.h));
        for (&j, a) in &self.out[i] {
            if let Some(b) = self.out[j].get(&k) {
                acc.add_scaled(1, &a.mul(b));
            }
        }
        acc
    }

    /// Pairs `(i, k)` where the identity coefficient can be nonzero.
    fn identity_support(&self) -> Vec<(usize, usize)> {
        let mut s: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (i, j, _) in self.entries() {
            s.insert((i, j));
            for &k in self.out[j].keys() {
                s.insert((i, k));
            }
        }
        s.into_iter().collect()
    }

    /// Verify the type D identity; returns the generator pairs that fail.
    pub fn verify(&self) -> Result<Vec<(usize, usize)>> {
        self.check_gradings()?;
        let pairs = self.identity_support();
        let bad: Vec<Result<Option<(usize, usize)>>> = pairs
            .par_iter()
            .map(|&(i, k)| {
                let c = self.identity_coefficient(i, k);
                Ok(if self.alg.is_zero(&c)? { None } else { Some((i, k)) })
            })
            .collect();
        let mut out = Vec::new();
        for b in bad {
            if let Some(p) = b? {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// Count of generators per (idempotent, h, q2).
    pub fn graded_counts(&self) -> BTreeMap<(VertexId, i32, i32), usize> {
        let mut m = BTreeMap::new();
        for g in &self.gens {
            *m.entry((g.idem, g.grading.h, g.grading.q2)).or_insert(0) += 1;
        }
        m
    }

    /// Graded Euler characteristic per (idempotent, q2).
    pub fn euler(&self) -> BTreeMap<(VertexId, i32), i64> {
        let mut m = BTreeMap::new();
        for g in &self.gens {
            *m.entry((g.idem, g.grading.q2)).or_insert(0) += parity(g.grading.h);
        }
        m.retain(|_, v| *v != 0);
        m
    }

    pub fn identity_morphism(&self) -> Morphism {
        let mut f = Morphism::new(self.dim(), self.dim());
        for (i, g) in self.gens.iter().enumerate() {
            f.set(i, i, Element::idempotent(g.idem));
        }
        f
    }

    /// Cancel the unit entry `a_xy = ±I`.
    pub fn cancel(&self, x: usize, y: usize) -> Result<Cancellation> {
        let u = self
            .out[x]
            .get(&y)
            .and_then(|e| e.unit_multiple())
            .filter(|c| c.abs() == 1 && x != y)
            .ok_or_else(|| Error::NotAnIdentityEntry(format!("a[{x}][{y}] = {}", self.get(x, y).display(&self.alg.quiver))))?;
        let keep: Vec<usize> = (0..self.dim()).filter(|&i| i != x && i != y).collect();
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(a, &i)| (i, a)).collect();
        let mut red = TypeD::new(self.alg.clone(), keep.iter().map(|&i| self.gens[i].clone()).collect());
        for &i in &keep {
            for (j, e) in &self.out[i] {
                if let Some(&b) = pos.get(j) {
                    red.set(pos[&i], b, e.clone());
                }
            }
        }
        // zig-zag through y <- x: subtract a_iy u a_xj
        let mut touched = Vec::new();
        for &i in self.inc[y].iter().filter(|&&i| i != x) {
            let Some(&pi) = pos.get(&i) else { continue };
            let a_iy = &self.out[i][&y];
            for (j, a_xj) in &self.out[x] {
                let Some(&pj) = pos.get(j) else { continue };
                red.add_to(pi, pj, -u, &a_iy.mul(a_xj));
                touched.push((pi, pj));
            }
        }
        for (a, b) in touched {
            let e = red.get(a, b);
            if !e.is_structurally_zero() {
                red.set(a, b, self.alg.normal_form(&e)?);
            }
        }
        let (n, m) = (self.dim(), red.dim());
        let mut iota = Morphism::new(m, n);
        let mut pi = Morphism::new(n, m);
        let mut h = Morphism::new(n, n);
        for (a, &i) in keep.iter().enumerate() {
            iota.set(a, i, Element::idempotent(self.gens[i].idem));
            if let Some(a_iy) = self.out[i].get(&y) {
                iota.set(a, x, a_iy.scale(-u));
            }
            pi.set(i, a, Element::idempotent(self.gens[i].idem));
        }
        for (j, a_xj) in &self.out[x] {
            if let Some(&pj) = pos.get(j) {
                pi.set(y, pj, a_xj.scale(-u));
            }
        }
        h.set(y, x, Element::idempotent(self.gens[x].idem).scale(-u));
        Ok(Cancellation { reduced: red, iota, pi, homotopy: h, kept: keep, cancelled: (x, y) })
    }

    /// First unit entry in (source, target) order.
    pub fn first_unit_entry(&self) -> Option<(usize, usize)> {
        self.entries()
            .find(|(i, j, e)| i != j && e.unit_multiple().is_some_and(|c| c.abs() == 1))
            .map(|(i, j, _)| (i, j))
    }

    /// Cancel unit entries until none remain.
    pub fn reduce(&self, record: bool) -> Result<Reduction> {
        let mut cur = self.clone();
        let mut steps = Vec::new();
        let mut origin: Vec<usize> = (0..self.dim()).collect();
        while let Some((x, y)) = cur.first_unit_entry() {
            let c = cur.cancel(x, y)?;
            let pair = (origin[x], origin[y]);
            origin = c.kept.iter().map(|&i| origin[i]).collect();
            let next = c.reduced.clone();
            steps.push(Step { cancelled: pair, cancellation: if record { Some(c) } else { None }, before: if record { Some(cur) } else { None } });
            cur = next;
        }
        Ok(Reduction { reduced: cur, steps, origin })
    }

    pub fn serialize(&self) -> String {
        let q = &self.alg.quiver;
        let mut s = String::new();
        for (i, g) in self.gens.iter().enumerate() {
            let _ = write!(s, "gen {i} {} {}", q.vertex_label(g.idem), g.grading);
            if !g.label.is_empty() {
                let _ = write!(s, " # {}", g.label);
            }
            s.push('\n');
        }
        for (i, j, x) in self.entries() {
            let terms: Vec<String> = x.terms.iter().map(|(p, c)| format!("{c}*{}", q.path_label(x.source, p))).collect();
            let _ = writeln!(s, "delta {i} -> {} {j}", terms.join(" + "));
        }
        s
    }

    pub fn parse(text: &str) -> Result<TypeD> {
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let mut gens: Vec<(usize, String, Bigrading, String)> = Vec::new();
        let mut deltas: Vec<(usize, usize, usize, String)> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("gen ") {
                let (body, label) = match rest.split_once(" # ") {
                    Some((b, l)) => (b, l.trim().to_string()),
                    None => (rest, String::new()),
                };
                let parts: Vec<&str> = body.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(perr(ln, format!("expected `gen <id> <vertex> (<h>,<q>)`, got {line:?}")));
                }
                let id: usize = parts[0].parse().map_err(|_| perr(ln, format!("bad id {:?}", parts[0])))?;
                let gr = parse_bigrading(parts[2]).ok_or_else(|| perr(ln, format!("bad grading {:?}", parts[2])))?;
                gens.push((id, parts[1].to_string(), gr, label));
            } else if let Some(rest) = line.strip_prefix("delta ") {
                let (src, rest) = rest.split_once(" -> ").ok_or_else(|| perr(ln, "missing `->`".into()))?;
                let (terms, dst) = rest.rsplit_once(' ').ok_or_else(|| perr(ln, "missing target".into()))?;
                let src = src.trim().parse().map_err(|_| perr(ln, format!("bad source {src:?}")))?;
                let dst = dst.trim().parse().map_err(|_| perr(ln, format!("bad target {dst:?}")))?;
                deltas.push((ln, src, dst, terms.to_string()));
            } else {
                return Err(perr(ln, format!("unknown line {line:?}")));
            }
        }
        let first = gens.first().ok_or_else(|| perr(0, "no generators".into()))?;
        let points = first.1.split('|').next().unwrap_or("").split(',').count() * 2;
        let alg = algebra(points / 2)?;
        let mut gv = Vec::new();
        for (k, (id, v, gr, label)) in gens.into_iter().enumerate() {
            if id != k {
                return Err(perr(0, format!("generator ids must be 0..k in order, found {id} at {k}")));
            }
            gv.push(Generator { idem: alg.quiver.parse_vertex(&v)?, grading: gr, label });
        }
        let mut d = TypeD::new(alg.clone(), gv);
        for (ln, i, j, terms) in deltas {
            if i >= d.dim() || j >= d.dim() {
                return Err(perr(ln, format!("generator out of range in {i} -> {j}")));
            }
            let (s, t) = (d.gens[i].idem, d.gens[j].idem);
            let mut x = Element::zero(s, t);
            for term in terms.split(" + ") {
                let (c, p) = term.split_once('*').ok_or_else(|| perr(ln, format!("bad term {term:?}")))?;
                let c: i64 = c.trim().parse().map_err(|_| perr(ln, format!("bad coefficient {c:?}")))?;
                let path = alg.quiver.parse_path(s, p)?;
                if alg.quiver.path_target(s, &path) != Some(t) {
                    return Err(perr(ln, format!("path {p:?} does not end at generator {j}")));
                }
                x.add_term(path, c);
            }
            d.set(i, j, x);
        }
        Ok(d)
    }
}

fn parse_bigrading(s: &str) -> Option<Bigrading> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let (h, q) = inner.split_once(',')?;
    let h: i32 = h.trim().parse().ok()?;
    let q = q.trim();
    let q2 = match q.strip_suffix("/2") {
        Some(num) => num.parse().ok()?,
        None => 2 * q.parse::<i32>().ok()?,
    };
    Some(Bigrading { h, q2 })
}

/// A map `N -> A ⊗ N'` stored as a coefficient matrix.
#[derive(Clone, Debug)]
pub struct Morphism {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<BTreeMap<usize, Element>>,
}

impl Morphism {
    pub fn new(rows: usize, cols: usize) -> Morphism {
        Morphism { rows, cols, entries: vec![BTreeMap::new(); rows] }
    }

    pub fn set(&mut self, i: usize, j: usize, x: Element) {
        if x.is_structurally_zero() {
            self.entries[i].remove(&j);
        } else {
            self.entries[i].insert(j, x);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Element> {
        self.entries[i].get(&j)
    }

    pub fn row(&self, i: usize) -> &BTreeMap<usize, Element> {
        &self.entries[i]
    }

    /// `other ∗ self`: apply `self`, then `other` on the output.
    pub fn then(&self, other: &Morphism) -> Morphism {
        let mut out = Morphism::new(self.rows, other.cols);
        for i in 0..self.rows {
            let mut row: BTreeMap<usize, Element> = BTreeMap::new();
            for (j, a) in &self.entries[i] {
                for (k, b) in &other.entries[*j] {
                    let p = a.mul(b);
                    match row.get_mut(k) {
                        Some(e) => e.add_scaled(1, &p),
                        None => {
                            row.insert(*k, p);
                        }
                    }
                }
            }
            row.retain(|_, e| !e.is_structurally_zero());
            out.entries[i] = row;
        }
        out
    }

    /// Entries of `self - other`, both viewed between the same endpoints.
    pub fn minus(&self, other: &Morphism, src: &TypeD, dst: &TypeD) -> Morphism {
        let mut out = Morphism::new(self.rows, self.cols);
        for i in 0..self.rows {
            let keys: BTreeSet<usize> = self.entries[i].keys().chain(other.entries[i].keys()).copied().collect();
            for k in keys {
                let mut e = Element::zero(src.gens[i].idem, dst.gens[k].idem);
                if let Some(a) = self.entries[i].get(&k) {
                    e.add_scaled(1, a);
                }
                if let Some(b) = other.entries[i].get(&k) {
                    e.add_scaled(-1, b);
                }
                out.set(i, k, e);
            }
        }
        out
    }

    /// Failing pairs of `μ(I⊗δ')f - μ(I⊗f)δ + (d⊗|I|)f = 0`.
    pub fn verify(&self, src: &TypeD, dst: &TypeD) -> Result<Vec<(usize, usize)>> {
        let alg = &src.alg;
        let mut bad = Vec::new();
        for i in 0..self.rows {
            let mut coeff: BTreeMap<usize, Element> = BTreeMap::new();
            let mut add = |k: usize, c: i64, e: &Element| {
                coeff.entry(k).or_insert_with(|| Element::zero(src.gens[i].idem, dst.gens[k].idem)).add_scaled(c, e);
            };
            for (j, f) in &self.entries[i] {
                for (k, a) in dst.row(*j) {
                    add(*k, 1, &f.mul(a));
                }
                add(*j, parity(dst.gens[*j].grading.h), &alg.differential(f));
            }
            for (j, a) in src.row(i) {
                for (k, f) in &self.entries[*j] {
                    add(*k, -1, &a.mul(f));
                }
            }
            for (k, e) in coeff {
                if !alg.is_zero(&e)? {
                    bad.push((i, k));
                }
            }
        }
        Ok(bad)
    }

    /// Exact equality modulo the relations.
    pub fn equals(&self, other: &Morphism, src: &TypeD, dst: &TypeD) -> Result<bool> {
        let diff = self.minus(other, src, dst);
        for i in 0..diff.rows {
            for e in diff.entries[i].values() {
                if !src.alg.is_zero(e)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Check `psi - phi = μ(I⊗H)δ + μ(I⊗δ')H + (d⊗|I|)H` with `self = H`.
    pub fn verify_homotopy(&self, psi: &Morphism, phi: &Morphism, src: &TypeD, dst: &TypeD) -> Result<Vec<(usize, usize)>> {
        let alg = &src.alg;
        let diff = psi.minus(phi, src, dst);
        let mut bad = Vec::new();
        for i in 0..self.rows {
            let mut coeff: BTreeMap<usize, Element> = BTreeMap::new();
            let mut add = |k: usize, c: i64, e: &Element| {
                coeff.entry(k).or_insert_with(|| Element::zero(src.gens[i].idem, dst.gens[k].idem)).add_scaled(c, e);
            };
            for (k, e) in diff.row(i) {
                add(*k, 1, e);
            }
            for (j, a) in src.row(i) {
                for (k, h) in &self.entries[*j] {
                    add(*k, -1, &a.mul(h));
                }
            }
            for (j, h) in &self.entries[i] {
                for (k, a) in dst.row(*j) {
                    add(*k, -1, &h.mul(a));
                }
                add(*j, -parity(dst.gens[*j].grading.h), &alg.differential(h));
            }
            for (k, e) in coeff {
                if !alg.is_zero(&e)? {
                    bad.push((i, k));
                }
            }
        }
        Ok(bad)
    }
}

/// Result of one cancellation: the smaller structure, the inclusion and
/// projection between it and the original, and the homotopy on the original.
#[derive(Clone)]
pub struct Cancellation {
    pub reduced: TypeD,
    pub iota: Morphism,
    pub pi: Morphism,
    pub homotopy: Morphism,
    pub kept: Vec<usize>,
    pub cancelled: (usize, usize),
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Certificate {
    /// `sum_j a_xj a_jy = 0` for the cancelled pair.
    pub zigzag_vanishes: bool,
    pub iota_is_morphism: bool,
    pub pi_is_morphism: bool,
    pub pi_iota_is_identity: bool,
    pub iota_pi_homotopic_to_identity: bool,
}

impl Certificate {
    pub fn ok(&self) -> bool {
        self.zigzag_vanishes && self.iota_is_morphism && self.pi_is_morphism && self.pi_iota_is_identity && self.iota_pi_homotopic_to_identity
    }
}

impl Cancellation {
    pub fn certify(&self, original: &TypeD) -> Result<Certificate> {
        let red = &self.reduced;
        let id_red = red.identity_morphism();
        let id = original.identity_morphism();
        let (x, y) = self.cancelled;
        let mut zz = Element::zero(original.gens[x].idem, original.gens[y].idem);
        for (j, a) in original.row(x) {
            if let Some(b) = original.row(*j).get(&y) {
                zz.add_scaled(1, &a.mul(b));
            }
        }
        Ok(Certificate {
            zigzag_vanishes: original.alg.is_zero(&zz)?,
            iota_is_morphism: self.iota.verify(red, original)?.is_empty(),
            pi_is_morphism: self.pi.verify(original, red)?.is_empty(),
            pi_iota_is_identity: self.iota.then(&self.pi).equals(&id_red, red, red)?,
            iota_pi_homotopic_to_identity: self
                .homotopy
                .verify_homotopy(&self.pi.then(&self.iota), &id, original, original)?
                .is_empty(),
        })
    }
}

#[derive(Clone)]
pub struct Step {
    /// Original generator ids of the cancelled pair.
    pub cancelled: (usize, usize),
    pub cancellation: Option<Cancellation>,
    pub before: Option<TypeD>,
}

#[derive(Clone)]
pub struct Reduction {
    pub reduced: TypeD,
    pub steps: Vec<Step>,
    /// Original id of each surviving generator.
    pub origin: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::Side;

    /// Γ1 structure x -> y with coefficient I plus a left sign change.
    fn small() -> TypeD {
        let alg = algebra(1).unwrap();
        let q = &alg.quiver;
        let plus = q.parse_vertex("1-2|1-2|+").unwrap();
        let minus = q.parse_vertex("1-2|1-2|-").unwrap();
        let ldec = q.dec_edge(plus, 0, Side::Left).unwrap();
        let gens = vec![
            Generator { idem: plus, grading: Bigrading::new(0, 1), label: "a".into() },
            Generator { idem: plus, grading: Bigrading::new(1, 1), label: "b".into() },
            Generator { idem: minus, grading: Bigrading::new(0, -1), label: "c".into() },
            Generator { idem: minus, grading: Bigrading::new(1, -1), label: "d".into() },
        ];
        let mut d = TypeD::new(alg.clone(), gens);
        d.set(0, 1, Element::idempotent(plus));
        d.set(0, 2, Element::edge(q, ldec));
        d.set(1, 3, Element::edge(q, ldec).scale(-1));
        d.set(2, 3, Element::idempotent(minus));
        d
    }

    #[test]
    fn small_structure_is_type_d() {
        let d = small();
        assert!(d.verify().unwrap().is_empty());
        let mut bad = d.clone();
        bad.set(1, 3, Element::edge(&d.alg.quiver, d.alg.quiver.dec_edge(d.gens[0].idem, 0, Side::Left).unwrap()));
        assert_eq!(bad.verify().unwrap(), vec![(0, 3)]);
    }

    #[test]
    fn cancellation_is_certified() {
        let d = small();
        let c = d.cancel(0, 1).unwrap();
        assert_eq!(c.reduced.dim(), 2);
        assert!(c.certify(&d).unwrap().ok());
        assert!(c.reduced.verify().unwrap().is_empty());
        assert!(matches!(d.cancel(0, 2), Err(Error::NotAnIdentityEntry(_))));
    }

    #[test]
    fn reduce_cancels_everything_and_keeps_euler() {
        let d = small();
        let r = d.reduce(true).unwrap();
        assert_eq!(r.reduced.dim(), 0);
        assert_eq!(r.steps.len(), 2);
        assert_eq!(r.steps[0].cancelled, (0, 1));
        assert_eq!(d.euler(), r.reduced.euler());
    }

    #[test]
    fn serialization_round_trips() {
        let d = small();
        let text = d.serialize();
        let back = TypeD::parse(&text).unwrap();
        assert_eq!(back.serialize(), text);
        assert!(text.contains("(0,1/2)"));
    }
}
