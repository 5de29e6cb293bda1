//! The acceptance suite as library code, so the acceptance binary and the
//! `selftest` command run the same checks.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Algebra, Bigrading, Element, VertexId};
use crate::deltagen::{psi, Complex};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::planar::Side;
use crate::tangle::Tangle;
use crate::typed::{algebra, Reduction, TypeD};

/// Number of random diagrams in the type D identity check.
pub const RANDOM_DIAGRAMS: usize = 25;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: usize,
    pub name: &'static str,
    pub failures: Vec<String>,
    /// Failures recorded as unattainable in the decisions ledger.
    pub known: Vec<String>,
    pub notes: Vec<String>,
    pub seconds: f64,
    pub limit_seconds: Option<f64>,
}

impl Check {
    pub fn over_time(&self) -> bool {
        self.limit_seconds.is_some_and(|l| self.seconds > l)
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.known.is_empty() && !self.over_time()
    }

    /// Failed for a reason other than a known one.
    pub fn blocking(&self) -> bool {
        !self.failures.is_empty() || self.over_time()
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let limit = self.limit_seconds.map_or(String::new(), |l| format!(" (limit {l}s)"));
        let mut s = format!("[{status}] {}. {} [{:.3}s{limit}]", self.id, self.name, self.seconds);
        for n in &self.notes {
            s += &format!("\n       {n}");
        }
        for f in &self.known {
            s += &format!("\n       known: {f}");
        }
        for f in self.failures.iter().take(20) {
            s += &format!("\n       fail: {f}");
        }
        if self.failures.len() > 20 {
            s += &format!("\n       ... {} more", self.failures.len() - 20);
        }
        s
    }
}

fn run(id: usize, name: &'static str, limit: Option<u64>, f: impl FnOnce(&mut Check) -> Result<()>) -> Check {
    let mut c = Check {
        id,
        name,
        failures: Vec::new(),
        known: Vec::new(),
        notes: Vec::new(),
        seconds: 0.0,
        limit_seconds: limit.map(|s| s as f64),
    };
    let t = Instant::now();
    if let Err(e) = f(&mut c) {
        c.failures.push(format!("error: {e}"));
    }
    c.seconds = t.elapsed().as_secs_f64();
    c
}

/// Seed from `CLEAVED_SEED`, default 1.
pub fn seed() -> u64 {
    std::env::var("CLEAVED_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(1)
}

/// The seeded random diagrams: at most 4 boundary points and 4 crossings.
pub fn random_tangles(seed: u64, count: usize) -> Vec<Tangle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Tangle::random(&mut rng, 4, 4)).collect()
}

pub fn all(seed: u64) -> Vec<Check> {
    vec![
        gamma_one(),
        gamma_two(),
        theorem_suite(),
        planar_examples(),
        type_d_identity(seed),
        trefoil_reduction(),
        certification(),
        invariance(),
        conservation(seed),
    ]
}

fn tangle(text: &str) -> Result<Tangle> {
    Tangle::parse(text)
}

pub fn gamma_one() -> Check {
    run(1, "BΓ1: 2 vertices, 2 edges, gradings (1,1) and (0,-1), trivial products, d = 0", Some(1), |c| {
        let alg = algebra(1)?;
        let q = &alg.quiver;
        c.expect(q.vertices.len() == 2, || format!("{} vertices", q.vertices.len()));
        c.expect(q.edges.len() == 2, || format!("{} edges", q.edges.len()));
        let got: BTreeSet<Bigrading> = q.edges.iter().map(|e| e.grading()).collect();
        let want: BTreeSet<Bigrading> = [Bigrading::new(1, 2), Bigrading::new(0, -2)].into();
        c.expect(got == want, || format!("edge gradings {got:?}"));
        for a in 0..q.edges.len() {
            for b in 0..q.edges.len() {
                let p = alg.edge(a).mul(&alg.edge(b));
                c.expect(alg.is_zero(&p)?, || format!("{} * {} is nonzero", q.edge_label(a), q.edge_label(b)));
            }
            let d = alg.differential(&alg.edge(a));
            c.expect(d.is_structurally_zero(), || format!("d({}) = {}", q.edge_label(a), d.display(q)));
        }
        Ok(())
    })
}

/// A path given by its vertex labels and the side of each step.
fn walk(alg: &Algebra, vertices: &[&str], sides: &[Side]) -> Result<Element> {
    let q = &alg.quiver;
    let vs: Vec<VertexId> = vertices.iter().map(|v| q.parse_vertex(v)).collect::<Result<_>>()?;
    let mut path = Vec::new();
    for (w, side) in vs.windows(2).zip(sides) {
        let e = q.edge_between(w[0], w[1], *side).ok_or_else(|| {
            Error::Invalid(format!("no {:?} edge {} -> {}", side, q.vertex_label(w[0]), q.vertex_label(w[1])))
        })?;
        path.push(e);
    }
    Ok(Element::path(vs[0], *vs.last().unwrap(), path, 1))
}

pub fn gamma_two() -> Check {
    run(2, "BΓ2: census and the displayed relation instances", Some(5), |c| {
        use Side::{Left as L, Right as R};
        let alg = algebra(2)?;
        let q = &alg.quiver;
        if q.vertices.len() != 10 {
            c.known.push(format!("{} vertices, expected 10 (2+2+4+4 sign choices is 12)", q.vertices.len()));
        }
        c.expect(q.edges.len() == 44, || format!("{} edges", q.edges.len()));
        c.notes.push(format!("{} vertices, {} edges", q.vertices.len(), q.edges.len()));
        // E = m1#m1 (circles E1, E2), F = m1#m2, D = m2#m1, C = m2#m2 (circles C1, C2)
        let e = |s: &str| format!("1-2,3-4|1-2,3-4|{s}");
        let f = |s: &str| format!("1-2,3-4|1-4,2-3|{s}");
        let d = |s: &str| format!("1-4,2-3|1-2,3-4|{s}");
        let cc = |s: &str| format!("1-4,2-3|1-4,2-3|{s}");
        let w = |v: &[String], s: &[Side]| walk(&alg, &v.iter().map(String::as_str).collect::<Vec<_>>(), s);
        let mut instances: Vec<(&str, Element)> = Vec::new();
        // disjoint supports
        instances.push((
            "R.e_E1 L.e_E2 = L.e_E2 R.e_E1",
            w(&[e("++"), e("-+"), e("--")], &[R, L])?.minus(&w(&[e("++"), e("+-"), e("--")], &[L, R])?),
        ));
        instances.push((
            "L.e_E1 L.e_E2 = -L.e_E2 L.e_E1",
            w(&[e("++"), e("-+"), e("--")], &[L, L])?.plus(&w(&[e("++"), e("+-"), e("--")], &[L, L])?),
        ));
        // merges and a divide
        let r_merge = [
            w(&[e("++"), e("-+"), f("-")], &[R, R])?,
            w(&[e("++"), e("+-"), f("-")], &[R, R])?,
            w(&[e("++"), f("+"), f("-")], &[R, R])?,
        ];
        instances.push(("R.e_E1 R.δ = R.e_E2 R.δ", r_merge[0].minus(&r_merge[1])));
        instances.push(("R.e_E2 R.δ = R.δ R.e_F", r_merge[1].minus(&r_merge[2])));
        let l_merge = [
            w(&[e("++"), e("-+"), d("-")], &[R, L])?,
            w(&[e("++"), e("+-"), d("-")], &[R, L])?,
            w(&[e("++"), d("+"), d("-")], &[L, R])?,
        ];
        instances.push(("R.e_E1 L.δ = R.e_E2 L.δ", l_merge[0].minus(&l_merge[1])));
        instances.push(("R.e_E2 L.δ = L.δ R.e_D", l_merge[1].minus(&l_merge[2])));
        let divide = [
            w(&[f("+"), f("-"), e("--")], &[R, R])?,
            w(&[f("+"), e("+-"), e("--")], &[R, R])?,
            w(&[f("+"), e("-+"), e("--")], &[R, R])?,
        ];
        instances.push(("R.e_F R.γ_- = R.γ_a R.e_E1", divide[0].minus(&divide[1])));
        instances.push(("R.γ_a R.e_E1 = R.γ_b R.e_E2", divide[1].minus(&divide[2])));
        // there and back
        let back_a = w(&[e("++"), f("+"), e("+-")], &[R, R])?;
        let back_b = w(&[e("++"), f("+"), e("-+")], &[R, R])?;
        let e2 = w(&[e("++"), e("+-")], &[R])?;
        let e1 = w(&[e("++"), e("-+")], &[R])?;
        instances.push(("R.δ R.η_a = R.e_E2", back_a.minus(&e2)));
        instances.push(("R.δ R.η_b = R.e_E1", back_b.minus(&e1)));
        c.expect(alg.normal_form(&back_b)? == e1, || "normal form of R.δ R.η_b is not R.e_E1".into());
        // a pair of bridges in one diagram
        instances.push((
            "R.γ_a L.δ = L.γ_a R.ν",
            w(&[f("+"), e("+-"), d("-")], &[R, L])?.minus(&w(&[f("+"), cc("+-"), d("-")], &[L, R])?),
        ));
        // differentials
        let le_f = w(&[f("+"), f("-")], &[L])?;
        let rhs = w(&[f("+"), cc("+-"), f("-")], &[L, L])?.plus(&w(&[f("+"), cc("-+"), f("-")], &[L, L])?).scale(-1);
        instances.push(("d(L.e_F) = -L.γ_a L.ν - L.γ_b L.ν", alg.differential(&le_f).minus(&rhs)));
        let le_c2 = w(&[cc("++"), cc("+-")], &[L])?;
        let rhs = w(&[cc("++"), f("+"), cc("+-")], &[L, L])?.scale(-1);
        instances.push(("d(L.e_C2) = -L.ν L.γ_a", alg.differential(&le_c2).minus(&rhs)));
        for (name, x) in &instances {
            c.expect(alg.is_zero(x)?, || format!("{name}: {} is not in the ideal", x.display(q)));
        }
        // a nonzero composite stays nonzero
        c.expect(!alg.is_zero(&r_merge[0])?, || "R.e_E1 R.δ vanishes".into());
        c.notes.push(format!("{} relation instances", instances.len()));
        Ok(())
    })
}

/// Vertex pairs carrying a relation row or an edge.
fn checked_pairs(alg: &Algebra) -> Vec<(VertexId, VertexId)> {
    let mut pairs: BTreeSet<(VertexId, VertexId)> = alg.related_pairs().into_iter().collect();
    pairs.extend(alg.quiver.edges.iter().map(|e| (e.source, e.target)));
    pairs.into_iter().collect()
}

/// Run the per-pair algebra checks; returns (pairs, rows, violations).
pub fn algebra_suite(alg: &Algebra) -> Result<(usize, usize, Vec<String>)> {
    let pairs = checked_pairs(alg);
    let results: Vec<Result<_>> = pairs.par_iter().map(|&(u, w)| alg.check_pair(u, w)).collect();
    let mut rows = 0;
    let mut bad = Vec::new();
    for r in results {
        let r = r?;
        rows += r.rows;
        bad.extend(r.violations);
    }
    Ok((pairs.len(), rows, bad))
}

pub fn theorem_suite() -> Check {
    run(3, "algebra theorems: homogeneity, ι-decrease, d² = 0, Leibniz on every row (n ≤ 3)", Some(300), |c| {
        for n in 1..=3 {
            let alg = algebra(n)?;
            let (pairs, rows, bad) = algebra_suite(&alg)?;
            c.notes.push(format!("n = {n}: {pairs} vertex pairs, {rows} relation rows, {} violations", bad.len()));
            if n == 3 {
                c.expect(pairs >= 500, || format!("only {pairs} vertex pairs at n = 3"));
            }
            c.failures.extend(bad.into_iter().map(|v| format!("n = {n}: {v}")));
        }
        Ok(())
    })
}

pub fn planar_examples() -> Check {
    run(4, "planar examples T1, T2: structure map term for term", Some(1), |c| {
        let s1 = |s: &str| format!("1-4,2-3|1-4,2-3|{s}");
        let s2 = |s: &str| format!("1-2,3-4|1-4,2-3|{s}");
        let t1 = Complex::build(&tangle(fixtures::T1)?)?;
        let plus = "1-2|1-2|+".to_string();
        let minus = "1-2|1-2|-".to_string();
        compare_planar(
            c,
            "T1",
            &t1.structure,
            &[(plus.clone(), 1), (minus.clone(), -1)],
            &[(plus, minus)],
        )?;
        let t2 = Complex::build(&tangle(fixtures::T2)?)?;
        let grades = [
            (s1("++"), 2),
            (s1("+-"), 0),
            (s1("-+"), 0),
            (s1("--"), -2),
            (s2("+"), 1),
            (s2("-"), -1),
        ];
        let terms = [
            (s1("++"), s2("+")),
            (s1("++"), s1("-+")),
            (s1("++"), s1("+-")),
            (s1("+-"), s2("-")),
            (s1("+-"), s1("--")),
            (s1("-+"), s2("-")),
            (s1("-+"), s1("--")),
            (s2("+"), s1("+-")),
            (s2("+"), s1("-+")),
            (s2("+"), s2("-")),
            (s2("-"), s1("--")),
        ];
        compare_planar(c, "T2", &t2.structure, &grades, &terms)?;
        Ok(())
    })
}

/// Crossingless structures have one generator per vertex and every term is
/// `+1` times the left edge between the two vertices.
fn compare_planar(c: &mut Check, name: &str, d: &TypeD, grades: &[(String, i32)], terms: &[(String, String)]) -> Result<()> {
    let q = &d.alg.quiver;
    let by_vertex: BTreeMap<VertexId, usize> = d.gens.iter().enumerate().map(|(i, g)| (g.idem, i)).collect();
    c.expect(by_vertex.len() == d.dim() && d.dim() == grades.len(), || format!("{name}: {} generators", d.dim()));
    for (v, q2) in grades {
        let i = by_vertex[&q.parse_vertex(v)?];
        let g = d.gens[i].grading;
        c.expect(g == Bigrading::new(0, *q2), || format!("{name}: {v} in grading {g}"));
    }
    let mut want = BTreeMap::new();
    for (u, w) in terms {
        let (u, w) = (q.parse_vertex(u)?, q.parse_vertex(w)?);
        let e = q.edge_between(u, w, Side::Left).ok_or_else(|| Error::Invalid(format!("{name}: missing edge")))?;
        want.insert((by_vertex[&u], by_vertex[&w]), Element::edge(q, e));
    }
    let got: BTreeMap<(usize, usize), Element> = d.entries().map(|(i, j, x)| ((i, j), x.clone())).collect();
    for (k, x) in &want {
        match got.get(k) {
            Some(y) if y == x => {}
            other => c.failures.push(format!(
                "{name}: {} -> {}: expected {}, got {}",
                d.gens[k.0].label,
                d.gens[k.1].label,
                x.display(q),
                other.map_or("nothing".to_string(), |y| y.display(q))
            )),
        }
    }
    for (k, y) in &got {
        c.expect(want.contains_key(k), || format!("{name}: extra term {} -> {}: {}", d.gens[k.0].label, d.gens[k.1].label, y.display(q)));
    }
    c.notes.push(format!("{name}: {} generators, {} terms", d.dim(), got.len()));
    Ok(())
}

pub fn type_d_identity(seed: u64) -> Check {
    run(5, "type D identity on T1, T2, the trefoil and random diagrams", Some(600), |c| {
        let mut list: Vec<(String, Tangle)> = vec![
            ("T1".into(), tangle(fixtures::T1)?),
            ("T2".into(), tangle(fixtures::T2)?),
            ("trefoil".into(), tangle(fixtures::TREFOIL)?),
        ];
        for (k, t) in random_tangles(seed, RANDOM_DIAGRAMS).into_iter().enumerate() {
            list.push((format!("random #{k}"), t));
        }
        let mut gens = 0;
        let mut pairs_failed = 0;
        for (name, t) in &list {
            let cx = Complex::build(t)?;
            gens += cx.structure.dim();
            let bad = cx.structure.verify()?;
            pairs_failed += bad.len();
            c.expect(bad.is_empty(), || format!("{name}: {} failing generator pairs", bad.len()));
        }
        c.notes.push(format!(
            "{} diagrams (seed {seed}), {gens} generators, {pairs_failed} failing pairs",
            list.len()
        ));
        Ok(())
    })
}

/// The trefoil complex and its reduction in the default cancellation order.
pub fn reduce_trefoil(record: bool) -> Result<(Complex, Reduction)> {
    let cx = Complex::build(&tangle(fixtures::TREFOIL)?)?;
    let red = cx.structure.reduce(record)?;
    Ok((cx, red))
}

pub fn trefoil_reduction() -> Check {
    run(6, "trefoil reduction: 6 generators, gradings, idempotents, δ up to per-generator sign", Some(30), |c| {
        use Side::{Left as L, Right as R};
        let (cx, red) = reduce_trefoil(false)?;
        let d = &red.reduced;
        let q = &d.alg.quiver;
        let plus = q.parse_vertex("1-2|1-2|+")?;
        let minus = q.parse_vertex("1-2|1-2|-")?;
        let table = [
            ("s-3+", -3, -15, plus),
            ("s-3-", -3, -17, minus),
            ("s-2+", -2, -11, plus),
            ("s-2-", -2, -13, minus),
            ("s0+", 0, -3, plus),
            ("s0-", 0, -5, minus),
        ];
        c.expect(d.dim() == 6, || format!("{} generators survive", d.dim()));
        let mut at = Vec::new();
        for (name, h, q2, idem) in table {
            let hits: Vec<usize> = (0..d.dim()).filter(|&i| d.gens[i].grading == Bigrading::new(h, q2)).collect();
            if hits.len() != 1 {
                c.failures.push(format!("{name}: {} generators in grading {}", hits.len(), Bigrading::new(h, q2)));
                return Ok(());
            }
            c.expect(d.gens[hits[0]].idem == idem, || format!("{name}: idempotent {}", q.vertex_label(d.gens[hits[0]].idem)));
            at.push(hits[0]);
        }
        c.notes.push(format!(
            "survivors: {}",
            at.iter().map(|&i| format!("{} {}", d.gens[i].label, d.gens[i].grading)).collect::<Vec<_>>().join(", ")
        ));
        let edge = |side| q.dec_edge(plus, 0, side).map(|e| Element::edge(q, e)).unwrap();
        let want = [(0, 3, edge(R).scale(2)), (0, 1, edge(L)), (2, 3, edge(L).scale(-1)), (4, 5, edge(L).scale(-1))];
        let mut ratio = BTreeMap::new();
        for (a, b, x) in &want {
            let y = d.get(at[*a], at[*b]);
            if d.alg.equal(&y, x)? {
                ratio.insert((*a, *b), 1);
            } else if d.alg.equal(&y, &x.scale(-1))? {
                ratio.insert((*a, *b), -1);
            } else {
                c.failures.push(format!("{} -> {}: {} is not ±{}", table[*a].0, table[*b].0, y.display(q), x.display(q)));
            }
        }
        let wanted: BTreeSet<(usize, usize)> = want.iter().map(|(a, b, _)| (at[*a], at[*b])).collect();
        for (i, j, y) in d.entries() {
            c.expect(wanted.contains(&(i, j)), || format!("extra term {} -> {}: {}", d.gens[i].label, d.gens[j].label, y.display(q)));
        }
        match solve_signs(6, &ratio) {
            Some(eps) => c.notes.push(format!("generator signs relative to the reference table: {eps:?}")),
            None => c.failures.push("no consistent per-generator sign change".into()),
        }
        let two = d.get(at[0], at[3]);
        let content: Vec<i64> = two.terms.values().map(|v| v.abs()).collect();
        c.expect(content == [2], || format!("coefficient of R.e_C is {}", two.display(q)));
        c.notes.push(format!("{} states, {} cancellations", cx.states.len(), red.steps.len()));
        Ok(())
    })
}

/// Signs `e` with `e[a] e[b] = r` for every `(a, b) -> r`.
fn solve_signs(n: usize, ratio: &BTreeMap<(usize, usize), i64>) -> Option<Vec<i64>> {
    let mut eps = vec![0i64; n];
    for start in 0..n {
        if eps[start] != 0 {
            continue;
        }
        eps[start] = 1;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for (&(a, b), &r) in ratio {
                let v = if a == u { b } else if b == u { a } else { continue };
                let s = eps[u] * r;
                if eps[v] == 0 {
                    eps[v] = s;
                    stack.push(v);
                } else if eps[v] != s {
                    return None;
                }
            }
        }
    }
    Some(eps)
}

pub fn certification() -> Check {
    run(7, "cancellation certificates on every trefoil step", None, |c| {
        let (_, red) = reduce_trefoil(true)?;
        for (k, step) in red.steps.iter().enumerate() {
            let (Some(canc), Some(before)) = (&step.cancellation, &step.before) else {
                return Err(Error::Invalid("steps were not recorded".into()));
            };
            let cert = canc.certify(before)?;
            c.expect(cert.ok(), || format!("step {k} {:?}: {cert:?}", step.cancelled));
            let bad = canc.reduced.verify()?;
            c.expect(bad.is_empty(), || format!("step {k}: reduced structure fails on {} pairs", bad.len()));
        }
        c.notes.push(format!("{} steps certified", red.steps.len()));
        Ok(())
    })
}

/// All permutations of `0..k`.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

pub fn invariance() -> Check {
    run(8, "invariance: Ψ for all trefoil orderings, Reidemeister pairs agree after reduction", Some(300), |c| {
        let t = tangle(fixtures::TREFOIL)?;
        let base = Complex::build(&t)?;
        let perms = permutations(t.crossing_count());
        for p in &perms {
            let other = Complex::build(&t.reorder(p)?)?;
            let m = psi(&base, &other)?;
            let bad = m.verify(&base.structure, &other.structure)?;
            c.expect(bad.is_empty(), || format!("order {p:?}: Ψ fails on {} entries", bad.len()));
            let bad = other.structure.verify()?;
            c.expect(bad.is_empty(), || format!("order {p:?}: not a type D structure"));
        }
        c.notes.push(format!("{} orderings", perms.len()));
        for (name, before, after) in fixtures::MOVES {
            let a = Complex::build(&tangle(before)?)?.structure;
            let b = Complex::build(&tangle(after)?)?.structure;
            let (ra, rb) = (a.reduce(false)?.reduced, b.reduce(false)?.reduced);
            let same = ra.graded_counts() == rb.graded_counts();
            c.expect(same, || format!("{name}: graded counts differ"));
            c.notes.push(format!("{name}: {} and {} generators reduce to {} and {}", a.dim(), b.dim(), ra.dim(), rb.dim()));
        }
        Ok(())
    })
}

/// Every cancellation of a reduction keeps the Euler characteristic; returns
/// the number of steps checked.
pub fn check_conservation(original: &TypeD, red: &Reduction, failures: &mut Vec<String>, name: &str) -> usize {
    let start = original.euler();
    for (k, step) in red.steps.iter().enumerate() {
        if let (Some(canc), Some(before)) = (&step.cancellation, &step.before) {
            if before.euler() != canc.reduced.euler() {
                failures.push(format!("{name}: step {k} changes the Euler characteristic"));
            }
        }
    }
    if red.reduced.euler() != start {
        failures.push(format!("{name}: reduction changes the Euler characteristic"));
    }
    red.steps.len()
}

pub fn conservation(seed: u64) -> Check {
    run(9, "Euler characteristic per idempotent is kept by every cancellation", None, |c| {
        let mut list: Vec<(String, Tangle)> = fixtures::ALL
            .iter()
            .map(|(name, text)| Ok((name.to_string(), tangle(text)?)))
            .collect::<Result<_>>()?;
        for (k, t) in random_tangles(seed, RANDOM_DIAGRAMS).into_iter().enumerate() {
            list.push((format!("random #{k}"), t));
        }
        let mut steps = 0;
        for (name, t) in &list {
            let d = Complex::build(t)?.structure;
            let red = d.reduce(true)?;
            steps += check_conservation(&d, &red, &mut c.failures, name);
        }
        c.notes.push(format!("{} diagrams, {steps} cancellations", list.len()));
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_of_three() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p.iter().collect::<BTreeSet<_>>().len(), 6);
    }

    #[test]
    fn sign_solver() {
        let r: BTreeMap<_, _> = [((0, 1), -1), ((1, 2), -1)].into();
        assert_eq!(solve_signs(3, &r), Some(vec![1, -1, 1]));
        let r: BTreeMap<_, _> = [((0, 1), -1), ((1, 2), -1), ((0, 2), -1)].into();
        assert_eq!(solve_signs(3, &r), None);
    }

    #[test]
    fn seeded_diagrams_repeat() {
        let a: Vec<String> = random_tangles(7, 5).iter().map(|t| t.serialize()).collect();
        let b: Vec<String> = random_tangles(7, 5).iter().map(|t| t.serialize()).collect();
        assert_eq!(a, b);
    }
}
