//! Tangle diagrams in the right half-plane, read from an extended PD code,
//! and their resolutions.
//!
//! A crossing lists its four edge labels counterclockwise starting at the
//! incoming under-strand. The 0-smoothing joins slots 0-1 and 2-3, the
//! 1-smoothing joins 0-3 and 1-2. Both are unchanged if the listing starts
//! at the other end of the under-strand, so unoriented diagrams may start
//! at either end.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::planar::{BridgeClass, Matching, Side};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub id: String,
    pub slots: [String; 4],
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Item {
    Blank,
    Comment,
    Boundary,
    Crossing(usize),
    Endpoint(usize, String),
    Order,
    Orient,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Line {
    item: Item,
    comment: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Tangle {
    points: usize,
    crossings: Vec<Crossing>,
    order: Vec<usize>,
    orient: Option<(usize, usize)>,
    lines: Vec<Line>,
    edges: Vec<String>,
    slot_edges: Vec<[usize; 4]>,
    point_edge: Vec<usize>,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

impl Tangle {
    pub fn parse(text: &str) -> Result<Tangle> {
        let mut points = None;
        let mut crossings: Vec<Crossing> = Vec::new();
        let mut endpoints: Vec<(usize, usize, String)> = Vec::new();
        let mut order_ids: Option<(usize, Vec<String>)> = None;
        let mut orient = None;
        let mut lines = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            let (body, comment) = match raw.find('#') {
                Some(p) => (&raw[..p], Some(raw[p..].trim_end().to_string())),
                None => (raw, None),
            };
            let words: Vec<&str> = body.split_whitespace().collect();
            let item = match words.first().copied() {
                None if comment.is_some() => Item::Comment,
                None => Item::Blank,
                Some("boundary") => {
                    if words.len() != 2 {
                        return Err(perr(ln, "expected `boundary <2n>`"));
                    }
                    if points.is_some() {
                        return Err(perr(ln, "duplicate boundary line"));
                    }
                    let p: usize = words[1].parse().map_err(|_| perr(ln, format!("bad count {:?}", words[1])))?;
                    if p == 0 || !p.is_multiple_of(2) {
                        return Err(perr(ln, format!("boundary count {p} must be even and positive")));
                    }
                    points = Some(p);
                    Item::Boundary
                }
                Some("crossing") => {
                    if words.len() != 6 {
                        return Err(perr(ln, format!("a crossing needs an id and 4 half-edges, got {}", words.len().saturating_sub(1))));
                    }
                    if crossings.iter().any(|c| c.id == words[1]) {
                        return Err(perr(ln, format!("duplicate crossing id {}", words[1])));
                    }
                    crossings.push(Crossing {
                        id: words[1].to_string(),
                        slots: [words[2], words[3], words[4], words[5]].map(String::from),
                    });
                    Item::Crossing(crossings.len() - 1)
                }
                Some("endpoint") => {
                    if words.len() != 3 {
                        return Err(perr(ln, "expected `endpoint <k> <edge>`"));
                    }
                    let k: usize = words[1].parse().map_err(|_| perr(ln, format!("bad endpoint {:?}", words[1])))?;
                    endpoints.push((ln, k, words[2].to_string()));
                    Item::Endpoint(k, words[2].to_string())
                }
                Some("order") => {
                    if order_ids.is_some() {
                        return Err(perr(ln, "duplicate order line"));
                    }
                    order_ids = Some((ln, words[1..].iter().map(|s| s.to_string()).collect()));
                    Item::Order
                }
                Some("orient") => {
                    if words.len() != 5 || words[1] != "n+" || words[3] != "n-" {
                        return Err(perr(ln, "expected `orient n+ <k> n- <k>`"));
                    }
                    let p = words[2].parse().map_err(|_| perr(ln, "bad n+"))?;
                    let m = words[4].parse().map_err(|_| perr(ln, "bad n-"))?;
                    orient = Some((p, m));
                    Item::Orient
                }
                Some(w) => return Err(perr(ln, format!("unknown keyword {w:?}"))),
            };
            lines.push(Line { item, comment });
        }
        let points = points.ok_or_else(|| perr(0, "missing boundary line"))?;
        let mut point_label = vec![None; points];
        for (ln, k, lab) in &endpoints {
            if *k < 1 || *k > points {
                return Err(perr(*ln, format!("endpoint {k} outside 1..{points}")));
            }
            if point_label[k - 1].replace(lab.clone()).is_some() {
                return Err(perr(*ln, format!("endpoint {k} given twice")));
            }
        }
        let point_label: Vec<String> = point_label
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| perr(0, format!("endpoint {} missing", i + 1))))
            .collect::<Result<_>>()?;
        let order = match order_ids {
            None => (0..crossings.len()).collect(),
            Some((ln, ids)) => {
                let mut seen = vec![false; crossings.len()];
                let mut out = Vec::new();
                for id in &ids {
                    let c = crossings
                        .iter()
                        .position(|c| &c.id == id)
                        .ok_or_else(|| perr(ln, format!("order names unknown crossing {id}")))?;
                    if std::mem::replace(&mut seen[c], true) {
                        return Err(perr(ln, format!("order repeats crossing {id}")));
                    }
                    out.push(c);
                }
                if out.len() != crossings.len() {
                    return Err(perr(ln, "order must list every crossing"));
                }
                out
            }
        };
        let mut t = Tangle { points, crossings, order, orient, lines, edges: Vec::new(), slot_edges: Vec::new(), point_edge: Vec::new() };
        t.index_edges(&point_label)?;
        t.check_planar()?;
        Ok(t)
    }

    fn index_edges(&mut self, point_label: &[String]) -> Result<()> {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut count: Vec<usize> = Vec::new();
        let mut id = |lab: &str, edges: &mut Vec<String>| -> usize {
            let e = *index.entry(lab.to_string()).or_insert_with(|| {
                edges.push(lab.to_string());
                count.push(0);
                edges.len() - 1
            });
            count[e] += 1;
            e
        };
        let mut edges = Vec::new();
        for c in &self.crossings {
            let s = [0, 1, 2, 3].map(|i| id(&c.slots[i], &mut edges));
            self.slot_edges.push(s);
        }
        for lab in point_label {
            self.point_edge.push(id(lab, &mut edges));
        }
        for (e, lab) in edges.iter().enumerate() {
            match count[e] {
                2 => {}
                1 => return Err(perr(0, format!("dangling edge label {lab}"))),
                k => return Err(perr(0, format!("edge label {lab} used {k} times"))),
            }
        }
        self.edges = edges;
        Ok(())
    }

    fn check_planar(&self) -> Result<()> {
        let c = self.crossings.len();
        let darts = 4 * c + self.points;
        let mut holder: Vec<Vec<usize>> = vec![Vec::new(); self.edges.len()];
        for (k, s) in self.slot_edges.iter().enumerate() {
            for i in 0..4 {
                holder[s[i]].push(4 * k + i);
            }
        }
        for (p, &e) in self.point_edge.iter().enumerate() {
            holder[e].push(4 * c + p);
        }
        let mut twin = vec![0; darts];
        for h in &holder {
            twin[h[0]] = h[1];
            twin[h[1]] = h[0];
        }
        let next = |d: usize| if d < 4 * c { d - d % 4 + (d + 1) % 4 } else { 4 * c + (d - 4 * c + 1) % self.points };
        let mut seen = vec![false; darts];
        let mut faces = 0;
        for d in 0..darts {
            if seen[d] {
                continue;
            }
            faces += 1;
            let mut x = d;
            while !seen[x] {
                seen[x] = true;
                x = next(twin[x]);
            }
        }
        // connectivity of crossings to the boundary vertex
        let vertex = |d: usize| if d < 4 * c { d / 4 } else { c };
        let mut reach = vec![false; c + 1];
        let mut stack = vec![c];
        reach[c] = true;
        while let Some(v) = stack.pop() {
            let ds: Vec<usize> = if v == c { (4 * c..darts).collect() } else { (4 * v..4 * v + 4).collect() };
            for d in ds {
                let w = vertex(twin[d]);
                if !reach[w] {
                    reach[w] = true;
                    stack.push(w);
                }
            }
        }
        if let Some(k) = reach.iter().position(|r| !r) {
            return Err(Error::NonPlanar(format!(
                "crossing {} is not connected to the boundary (split closed components are unsupported)",
                self.crossings[k].id
            )));
        }
        let euler = (c + 1) as i64 - self.edges.len() as i64 + faces as i64;
        if euler != 2 {
            return Err(Error::NonPlanar(format!(
                "V - E + F = {} - {} + {faces} = {euler}, rotation system is not planar in the half-plane",
                c + 1,
                self.edges.len()
            )));
        }
        Ok(())
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        for line in &self.lines {
            let body = match &line.item {
                Item::Blank | Item::Comment => String::new(),
                Item::Boundary => format!("boundary {}", self.points),
                Item::Crossing(k) => {
                    let c = &self.crossings[*k];
                    format!("crossing {} {}", c.id, c.slots.join(" "))
                }
                Item::Endpoint(k, lab) => format!("endpoint {k} {lab}"),
                Item::Order => {
                    let ids: Vec<&str> = self.order.iter().map(|&k| self.crossings[k].id.as_str()).collect();
                    format!("order {}", ids.join(" "))
                }
                Item::Orient => {
                    let (p, m) = self.orient.unwrap_or((0, 0));
                    format!("orient n+ {p} n- {m}")
                }
            };
            match (&line.comment, body.is_empty()) {
                (Some(c), true) => s.push_str(c),
                (Some(c), false) => {
                    let _ = write!(s, "{body} {c}");
                }
                (None, _) => s.push_str(&body),
            }
            s.push('\n');
        }
        s
    }

    /// Boundary points `2n`.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn n(&self) -> usize {
        self.points / 2
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Crossing indices (file order) listed in the ordering.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn orientation(&self) -> Option<(usize, usize)> {
        self.orient
    }

    pub fn edge_labels(&self) -> &[String] {
        &self.edges
    }

    pub fn slot_edges(&self, c: usize) -> [usize; 4] {
        self.slot_edges[c]
    }

    /// The same diagram with a new crossing order, given as file indices.
    pub fn reorder(&self, perm: &[usize]) -> Result<Tangle> {
        let mut seen = vec![false; self.crossings.len()];
        for &p in perm {
            if p >= seen.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Invalid(format!("{perm:?} is not a permutation of the crossings")));
            }
        }
        if perm.len() != seen.len() {
            return Err(Error::Invalid(format!("{perm:?} is not a permutation of the crossings")));
        }
        let mut t = self.clone();
        t.order = perm.to_vec();
        if !t.lines.iter().any(|l| l.item == Item::Order) {
            let at = t.lines.iter().rposition(|l| matches!(l.item, Item::Crossing(_))).map_or(t.lines.len(), |p| p + 1);
            t.lines.insert(at, Line { item: Item::Order, comment: None });
        }
        Ok(t)
    }

    /// Rank of each crossing (file index) in the ordering.
    pub fn rank(&self) -> Vec<usize> {
        let mut r = vec![0; self.order.len()];
        for (pos, &c) in self.order.iter().enumerate() {
            r[c] = pos;
        }
        r
    }

    /// Resolution word in crossing order, e.g. `010`.
    pub fn rho_word(&self, rho: u64) -> String {
        self.order.iter().map(|&c| if rho >> c & 1 == 1 { '1' } else { '0' }).collect()
    }

    /// Crossing signs read off from the under-strand orientations, when
    /// every strand's direction is determined. Fails on inconsistent data.
    pub fn crossing_signs(&self) -> Result<Option<Vec<i8>>> {
        // dir[e] = Some(true) when edge e flows into its first holder
        let c = self.crossings.len();
        let mut holders: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.edges.len()];
        for (k, s) in self.slot_edges.iter().enumerate() {
            for i in 0..4 {
                holders[s[i]].push((k, i));
            }
        }
        for (p, &e) in self.point_edge.iter().enumerate() {
            holders[e].push((c, p));
        }
        // into[d]: whether the strand at dart d enters its vertex
        let dart = |(k, i): (usize, usize)| if k < c { 4 * k + i } else { 4 * c + i };
        let darts = 4 * c + self.points;
        let mut into: Vec<Option<bool>> = vec![None; darts];
        let mut partner = vec![0; darts];
        for h in &holders {
            let (a, b) = (dart(h[0]), dart(h[1]));
            partner[a] = b;
            partner[b] = a;
        }
        let mut stack = Vec::new();
        for k in 0..c {
            stack.push((4 * k, true));
            stack.push((4 * k + 2, false));
        }
        while let Some((d, v)) = stack.pop() {
            match into[d] {
                Some(w) if w != v => {
                    return Err(Error::Invalid(format!("strand orientations disagree at edge {}", self.edges[self.edge_at(d)])))
                }
                Some(_) => continue,
                None => into[d] = Some(v),
            }
            stack.push((partner[d], !v));
            if d < 4 * c {
                stack.push((d - d % 4 + (d % 4 + 2) % 4, !v));
            }
        }
        let mut signs = Vec::with_capacity(c);
        for k in 0..c {
            match (into[4 * k + 1], into[4 * k + 3]) {
                (Some(a), Some(b)) if a != b => signs.push(if a { -1 } else { 1 }),
                _ => return Ok(None),
            }
        }
        Ok(Some(signs))
    }

    fn edge_at(&self, d: usize) -> usize {
        let c = self.crossings.len();
        if d < 4 * c { self.slot_edges[d / 4][d % 4] } else { self.point_edge[d - 4 * c] }
    }

    pub fn resolve(&self, rho: u64) -> Resolution {
        let ne = self.edges.len();
        let mut uf: Vec<usize> = (0..ne).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            let mut y = x;
            while uf[y] != r {
                let n = uf[y];
                uf[y] = r;
                y = n;
            }
            r
        }
        let union = |uf: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(uf, a), find(uf, b));
            if ra != rb {
                let (lo, hi) = (ra.min(rb), ra.max(rb));
                uf[hi] = lo;
            }
        };
        for (k, s) in self.slot_edges.iter().enumerate() {
            if rho >> k & 1 == 0 {
                union(&mut uf, s[0], s[1]);
                union(&mut uf, s[2], s[3]);
            } else {
                union(&mut uf, s[0], s[3]);
                union(&mut uf, s[1], s[2]);
            }
        }
        let roots: Vec<usize> = (0..ne).map(|e| find(&mut uf, e)).collect();
        // roots are minimal edges, so sorting roots sorts components by min edge
        let mut root_ids: Vec<usize> = roots.clone();
        root_ids.sort_unstable();
        root_ids.dedup();
        let comp_index: HashMap<usize, usize> = root_ids.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let comp_of_edge: Vec<usize> = roots.iter().map(|r| comp_index[r]).collect();
        let mut comp_points: Vec<Vec<usize>> = vec![Vec::new(); root_ids.len()];
        for (p, &e) in self.point_edge.iter().enumerate() {
            comp_points[comp_of_edge[e]].push(p + 1);
        }
        let mut partner = vec![0; self.points];
        let mut free = Vec::new();
        let mut kind = Vec::with_capacity(root_ids.len());
        for (i, pts) in comp_points.iter().enumerate() {
            match pts.as_slice() {
                [] => {
                    kind.push(Component::Free(free.len()));
                    free.push(i);
                }
                [a, b] => {
                    partner[a - 1] = *b;
                    partner[b - 1] = *a;
                    kind.push(Component::Arc { lo: *a, hi: *b });
                }
                _ => unreachable!("a component meets the boundary in 0 or 2 points"),
            }
        }
        let right = Matching::new(partner).expect("planar resolution gives a crossingless matching");
        let active = (0..self.crossings.len())
            .filter(|&k| rho >> k & 1 == 0)
            .map(|k| {
                let s = self.slot_edges[k];
                ActiveArc { crossing: k, feet: [comp_of_edge[s[0]], comp_of_edge[s[2]]] }
            })
            .collect();
        Resolution { rho, comp_of_edge, kind, free, right, active }
    }

    /// Random diagram from a slice sequence, with at most `max_crossings`
    /// crossings and at most `max_points` endpoints.
    pub fn random<R: Rng>(rng: &mut R, max_points: usize, max_crossings: usize) -> Tangle {
        loop {
            let pts = 2 * rng.gen_range(1..=max_points / 2);
            let mut b = Builder::new(pts);
            let crossings = rng.gen_range(0..=max_crossings);
            let mut made = 0;
            let mut bad = false;
            while made < crossings {
                let w = b.width();
                if w < 2 || (w < 6 && rng.gen_bool(0.25)) {
                    let at = rng.gen_range(0..=w);
                    b.cup(at, rng.gen_bool(0.5));
                    continue;
                }
                if w > 2 && rng.gen_bool(0.15) {
                    if b.cap(rng.gen_range(0..w - 1)).is_err() {
                        bad = true;
                        break;
                    }
                    continue;
                }
                b.cross(rng.gen_range(0..w - 1), rng.gen_bool(0.5));
                made += 1;
            }
            while !bad && b.width() > 0 {
                let w = b.width();
                if b.cap(rng.gen_range(0..w - 1)).is_err() {
                    bad = true;
                }
            }
            if bad {
                continue;
            }
            if let Ok(t) = b.finish(None) {
                return t;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    /// Index into the free-circle list.
    Free(usize),
    Arc { lo: usize, hi: usize },
}

/// The 0-resolved crossing `crossing` with feet on the components through
/// slot 0 and slot 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ActiveArc {
    pub crossing: usize,
    pub feet: [usize; 2],
}

#[derive(Clone, Debug)]
pub struct Resolution {
    pub rho: u64,
    pub comp_of_edge: Vec<usize>,
    pub kind: Vec<Component>,
    /// Component index of each free circle, in id order.
    pub free: Vec<usize>,
    pub right: Matching,
    pub active: Vec<ActiveArc>,
}

/// How an active arc acts on a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcRole {
    /// Both feet on free circles.
    FreeFree,
    /// One foot on an arc of the cleaved circle, the other on a free circle.
    ArcFree { arc: usize, free: usize },
    /// Both feet on the same arc.
    SameArc { arc: usize },
    /// Feet on different arcs: a right bridge of the cleaved link.
    Bridge(BridgeClass),
}

impl Resolution {
    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    pub fn role(&self, a: &ActiveArc) -> ArcRole {
        let [x, y] = a.feet;
        match (self.kind[x], self.kind[y]) {
            (Component::Free(_), Component::Free(_)) => ArcRole::FreeFree,
            (Component::Arc { lo, .. }, Component::Free(f)) | (Component::Free(f), Component::Arc { lo, .. }) => {
                ArcRole::ArcFree { arc: lo, free: f }
            }
            (Component::Arc { lo: a1, .. }, Component::Arc { lo: a2, .. }) if a1 == a2 => ArcRole::SameArc { arc: a1 },
            (Component::Arc { lo: a1, .. }, Component::Arc { lo: a2, .. }) => {
                let face = self.right.shared_face(a1, a2).expect("feet of an active arc share a face");
                ArcRole::Bridge(BridgeClass::new(Side::Right, face, a1, a2))
            }
        }
    }

    /// Free-circle index through an edge, if the edge lies on a free circle.
    pub fn free_of_edge(&self, e: usize) -> Option<usize> {
        match self.kind[self.comp_of_edge[e]] {
            Component::Free(f) => Some(f),
            Component::Arc { .. } => None,
        }
    }

    /// A representative edge for each free circle (its smallest edge).
    pub fn free_edges(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.free.len()];
        for (e, &c) in self.comp_of_edge.iter().enumerate() {
            if let Component::Free(f) = self.kind[c] {
                out[f] = out[f].min(e);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Flow {
    Out,
    In,
}

/// Assembles a diagram from vertical slices, scanning away from the axis.
/// Open strands are kept bottom to top with their edge label and whether
/// they flow away from (`Out`) or toward (`In`) the axis.
pub struct Builder {
    points: usize,
    next: usize,
    strands: Vec<(String, Flow)>,
    crossings: Vec<[String; 4]>,
    signs: Vec<i8>,
    endpoints: Vec<String>,
    oriented: bool,
}

impl Builder {
    /// Strands leave the axis at points 1..`points`, all flowing away.
    pub fn new(points: usize) -> Builder {
        let endpoints: Vec<String> = (1..=points).map(|k| format!("p{k}")).collect();
        let strands = endpoints.iter().map(|l| (l.clone(), Flow::Out)).collect();
        Builder { points, next: 0, strands, crossings: Vec::new(), signs: Vec::new(), endpoints, oriented: true }
    }

    /// As `new`, with the flow direction of each boundary strand.
    pub fn with_flow(flows: &[bool]) -> Builder {
        let mut b = Builder::new(flows.len());
        for (s, &out) in b.strands.iter_mut().zip(flows) {
            s.1 = if out { Flow::Out } else { Flow::In };
        }
        b
    }

    fn fresh(&mut self) -> String {
        self.next += 1;
        format!("e{}", self.next)
    }

    pub fn width(&self) -> usize {
        self.strands.len()
    }

    /// Strands `i` and `i+1` cross; the strand rising from `i` to `i+1` is
    /// over when `rising_over`.
    pub fn cross(&mut self, i: usize, rising_over: bool) -> &mut Builder {
        let (lb, fb) = self.strands[i].clone();
        let (lt, ft) = self.strands[i + 1].clone();
        let rb = self.fresh();
        let rt = self.fresh();
        // counterclockwise: RT, LT, LB, RB
        let ring = [rt.clone(), lt, lb, rb.clone()];
        let under_in = match (rising_over, ft, fb) {
            (true, Flow::Out, _) => 1,
            (true, Flow::In, _) => 3,
            (false, _, Flow::Out) => 2,
            (false, _, Flow::In) => 0,
        };
        let over_out = match (rising_over, fb, ft) {
            (true, Flow::Out, _) => 0,
            (true, Flow::In, _) => 2,
            (false, _, Flow::Out) => 3,
            (false, _, Flow::In) => 1,
        };
        self.signs.push(if (over_out + 4 - under_in) % 4 == 1 { 1 } else { -1 });
        self.crossings.push([0, 1, 2, 3].map(|k| ring[(under_in + k) % 4].clone()));
        self.strands[i] = (rb, ft);
        self.strands[i + 1] = (rt, fb);
        self
    }

    /// A new turn-back entering at position `i`; the lower end flows away
    /// from the axis when `lower_out`.
    pub fn cup(&mut self, i: usize, lower_out: bool) -> &mut Builder {
        let e = self.fresh();
        let (a, b) = if lower_out { (Flow::Out, Flow::In) } else { (Flow::In, Flow::Out) };
        self.strands.insert(i, (e.clone(), a));
        self.strands.insert(i + 1, (e, b));
        self
    }

    /// Join strands `i` and `i+1`.
    pub fn cap(&mut self, i: usize) -> Result<&mut Builder> {
        let (a, fa) = self.strands[i].clone();
        let (b, fb) = self.strands[i + 1].clone();
        if a == b {
            return Err(Error::ClosedComponent("cap closes a turn-back with no crossing".into()));
        }
        if fa == fb {
            self.oriented = false;
        }
        self.strands.drain(i..i + 2);
        for c in &mut self.crossings {
            for s in c.iter_mut() {
                if *s == b {
                    *s = a.clone();
                }
            }
        }
        for s in &mut self.endpoints {
            if *s == b {
                *s = a.clone();
            }
        }
        for s in &mut self.strands {
            if s.0 == b {
                s.0 = a.clone();
            }
        }
        Ok(self)
    }

    /// Emit the diagram text; strands still open are an error.
    pub fn text(&self, comment: Option<&str>) -> Result<String> {
        if !self.strands.is_empty() {
            return Err(Error::Invalid(format!("{} strands left open", self.strands.len())));
        }
        let mut s = String::new();
        if let Some(c) = comment {
            for l in c.lines() {
                let _ = writeln!(s, "# {l}");
            }
        }
        let _ = writeln!(s, "boundary {}", self.points);
        for (k, c) in self.crossings.iter().enumerate() {
            let _ = writeln!(s, "crossing c{} {}", k + 1, c.join(" "));
        }
        for (k, e) in self.endpoints.iter().enumerate() {
            let _ = writeln!(s, "endpoint {} {e}", k + 1);
        }
        Ok(s)
    }

    /// Parse the emitted text, adding an `orient` line when the strand
    /// flows were consistent.
    pub fn finish(&self, comment: Option<&str>) -> Result<Tangle> {
        let mut text = self.text(comment)?;
        if self.oriented {
            let t = Tangle::parse(&text)?;
            if let Some(signs) = t.crossing_signs()? {
                debug_assert_eq!(signs, self.signs);
            }
            let p = self.signs.iter().filter(|&&s| s > 0).count();
            let _ = writeln!(text, "orient n+ {p} n- {}", self.signs.len() - p);
        }
        Tangle::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

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
    fn trefoil_resolutions() {
        let t = trefoil();
        assert_eq!(t.crossing_count(), 3);
        assert_eq!(t.points(), 2);
        assert_eq!(t.crossing_signs().unwrap(), Some(vec![-1, -1, -1]));
        assert_eq!(t.orientation(), Some((0, 3)));
        assert_eq!(t.resolve(0b000).free_count(), 2);
        assert_eq!(t.resolve(0b111).free_count(), 1);
        assert_eq!(t.resolve(0b010).free_count(), 1);
    }

    #[test]
    fn round_trip_is_exact() {
        let text = "# demo\nboundary 2\ncrossing x a b b a # kink\n\nendpoint 1 a\nendpoint 2 a\norient n+ 1 n- 0\n";
        let err = Tangle::parse(text).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
        let text = "# demo\nboundary 2\ncrossing x a b b c # kink\n\nendpoint 1 a\nendpoint 2 c\norient n+ 1 n- 0\n";
        let t = Tangle::parse(text).unwrap();
        assert_eq!(t.serialize(), text);
        let t = trefoil();
        assert_eq!(Tangle::parse(&t.serialize()).unwrap().serialize(), t.serialize());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Tangle::parse("boundary 2\ncrossing x a b c d e\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Tangle::parse("boundary 3\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Tangle::parse("boundary 2\nendpoint 1 a\nendpoint 2 b\n"), Err(Error::Parse { .. })));
        // arcs 1-3 and 2-4 cross without a crossing
        let t = Tangle::parse("boundary 4\nendpoint 1 a\nendpoint 2 b\nendpoint 3 a\nendpoint 4 b\n");
        assert!(matches!(t, Err(Error::NonPlanar(_))));
        let mut b = Builder::new(2);
        b.cup(2, true);
        assert!(b.cap(2).is_err());
    }

    #[test]
    fn crossingless_diagrams() {
        let t = Tangle::parse("boundary 4\nendpoint 1 a\nendpoint 2 b\nendpoint 3 b\nendpoint 4 a\n").unwrap();
        let r = t.resolve(0);
        assert_eq!(r.free_count(), 0);
        assert_eq!(r.right.to_string(), "1-4,2-3");
        assert!(r.active.is_empty());
    }

    #[test]
    fn euler_oracle_on_random_diagrams() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let t = Tangle::random(&mut rng, 4, 4);
            assert!(t.crossing_count() <= 4 && t.points() <= 4);
            for rho in 0..1u64 << t.crossing_count() {
                let r = t.resolve(rho);
                // a smoothing change reconnects two arcs, or else moves the
                // component count by exactly one
                for a in &r.active {
                    let r2 = t.resolve(rho | 1 << a.crossing);
                    let d = r2.kind.len() as i64 - r.kind.len() as i64;
                    match r.role(a) {
                        ArcRole::Bridge(g) => {
                            assert_eq!(d, 0);
                            assert_eq!(r2.right, r.right.surgery(g.a, g.b).unwrap());
                        }
                        _ => {
                            assert_eq!(d.abs(), 1, "{}", t.serialize());
                            assert_eq!(r2.right, r.right);
                        }
                    }
                }
            }
            assert_eq!(Tangle::parse(&t.serialize()).unwrap().serialize(), t.serialize());
        }
    }

    #[test]
    fn reorder_rejects_non_permutations() {
        let t = trefoil();
        assert!(t.reorder(&[0, 0, 1]).is_err());
        let r = t.reorder(&[2, 0, 1]).unwrap();
        assert_eq!(r.rho_word(0b001), "010");
        assert!(r.serialize().contains("order c3 c1 c2"));
    }
}
