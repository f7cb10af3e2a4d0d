//! Fronts as words of slice events.
//!
//! A front is read left to right as a sequence of events acting on the
//! ordered list of strands present at each `x` (position 0 is the lowest
//! strand). A left cusp inserts a pair of strands, a crossing swaps two
//! neighbours and a right cusp deletes a pair. Every strand ("arc") runs
//! from a left cusp to a right cusp; its direction is fixed by the
//! orientation bit stored on its left cusp.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CornerKind, GridDiagram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    /// New strands at `pos` (lower) and `pos + 1` (upper).
    LeftCusp { pos: usize, upper_rightward: bool },
    /// Strands `pos` and `pos + 1` swap.
    Crossing { pos: usize },
    /// Strands `pos` and `pos + 1` end.
    RightCusp { pos: usize },
}

impl Event {
    pub fn pos(&self) -> usize {
        match *self {
            Event::LeftCusp { pos, .. } | Event::Crossing { pos } | Event::RightCusp { pos } => pos,
        }
    }

    /// Whether the event carries a Reeb chord after resolution.
    pub fn is_chord(&self) -> bool {
        !matches!(self, Event::LeftCusp { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Front {
    pub events: Vec<Event>,
}

pub type ArcId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub rightward: bool,
    pub left_event: usize,
    pub right_event: usize,
    pub component: usize,
}

/// Strand bookkeeping derived from a [`Front`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    pub arcs: Vec<Arc>,
    /// `slices[k]` lists the arcs (bottom to top) just left of event `k`;
    /// `slices[events.len()]` is the final, empty slice.
    pub slices: Vec<Vec<ArcId>>,
    /// For each event the arcs at `pos` and `pos + 1` on its left side
    /// (right side for left cusps).
    pub pairs: Vec<(ArcId, ArcId)>,
    pub components: usize,
}

impl Skeleton {
    /// Component id of every arc at the event's `pos` and `pos + 1`.
    pub fn event_components(&self, k: usize) -> (usize, usize) {
        let (a, b) = self.pairs[k];
        (self.arcs[a].component, self.arcs[b].component)
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, a: usize) -> usize {
        let mut r = a;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut a = a;
        while self.0[a] != r {
            let next = self.0[a];
            self.0[a] = r;
            a = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl Front {
    pub fn new(events: Vec<Event>) -> Result<Self> {
        let f = Front { events };
        f.skeleton()?;
        Ok(f)
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Builds the strand bookkeeping, validating the word on the way.
    pub fn skeleton(&self) -> Result<Skeleton> {
        let mut arcs: Vec<Arc> = Vec::new();
        let mut slices = Vec::with_capacity(self.events.len() + 1);
        let mut pairs = Vec::with_capacity(self.events.len());
        let mut cur: Vec<ArcId> = Vec::new();
        let mut links: Vec<(ArcId, ArcId)> = Vec::new();
        for (k, ev) in self.events.iter().enumerate() {
            slices.push(cur.clone());
            match *ev {
                Event::LeftCusp { pos, upper_rightward } => {
                    if pos > cur.len() {
                        return Err(Error::InvalidFront(format!(
                            "event {k}: left cusp at {pos} with only {} strands",
                            cur.len()
                        )));
                    }
                    let lo = arcs.len();
                    let arc = |rightward| Arc { rightward, left_event: k, right_event: usize::MAX, component: 0 };
                    arcs.push(arc(!upper_rightward));
                    arcs.push(arc(upper_rightward));
                    cur.insert(pos, lo + 1);
                    cur.insert(pos, lo);
                    pairs.push((lo, lo + 1));
                    links.push((lo, lo + 1));
                }
                Event::Crossing { pos } => {
                    if pos + 1 >= cur.len() {
                        return Err(Error::InvalidFront(format!(
                            "event {k}: crossing at {pos} with only {} strands",
                            cur.len()
                        )));
                    }
                    pairs.push((cur[pos], cur[pos + 1]));
                    cur.swap(pos, pos + 1);
                }
                Event::RightCusp { pos } => {
                    if pos + 1 >= cur.len() {
                        return Err(Error::InvalidFront(format!(
                            "event {k}: right cusp at {pos} with only {} strands",
                            cur.len()
                        )));
                    }
                    let (a, b) = (cur[pos], cur[pos + 1]);
                    if arcs[a].rightward == arcs[b].rightward {
                        return Err(Error::InvalidFront(format!(
                            "event {k}: right cusp joins two strands with the same direction"
                        )));
                    }
                    arcs[a].right_event = k;
                    arcs[b].right_event = k;
                    pairs.push((a, b));
                    links.push((a, b));
                    cur.drain(pos..pos + 2);
                }
            }
        }
        if !cur.is_empty() {
            return Err(Error::InvalidFront(format!("{} strands never close", cur.len())));
        }
        slices.push(cur);
        let mut uf = UnionFind((0..arcs.len()).collect());
        for (a, b) in links {
            uf.union(a, b);
        }
        let mut comp_of_root = std::collections::BTreeMap::new();
        for a in 0..arcs.len() {
            let r = uf.find(a);
            let next = comp_of_root.len();
            let id = *comp_of_root.entry(r).or_insert(next);
            arcs[a].component = id;
        }
        Ok(Skeleton { components: comp_of_root.len(), arcs, slices, pairs })
    }

    /// Sign of a crossing event: +1 when both strands point the same way.
    pub fn crossing_sign(sk: &Skeleton, k: usize) -> i32 {
        let (a, b) = sk.pairs[k];
        if sk.arcs[a].rightward == sk.arcs[b].rightward {
            1
        } else {
            -1
        }
    }

    pub fn writhe(&self) -> Result<i64> {
        let sk = self.skeleton()?;
        Ok(self
            .events
            .iter()
            .enumerate()
            .filter(|(_, e)| matches!(e, Event::Crossing { .. }))
            .map(|(k, _)| Self::crossing_sign(&sk, k) as i64)
            .sum())
    }

    pub fn right_cusps(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, Event::RightCusp { .. })).count()
    }

    pub fn crossing_count(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, Event::Crossing { .. })).count()
    }

    pub fn thurston_bennequin(&self) -> Result<i64> {
        Ok(self.writhe()? - self.right_cusps() as i64)
    }

    /// Signed cusp counts `down - up` per component.
    fn cusp_balance(&self, sk: &Skeleton) -> Vec<i64> {
        let mut bal = vec![0i64; sk.components];
        for (k, ev) in self.events.iter().enumerate() {
            let (lo, hi) = sk.pairs[k];
            // A cusp is traversed downward when it is entered along the upper branch.
            let entered_from_upper = match ev {
                Event::LeftCusp { .. } => !sk.arcs[hi].rightward,
                Event::RightCusp { .. } => sk.arcs[hi].rightward,
                Event::Crossing { .. } => continue,
            };
            let c = sk.arcs[lo].component;
            bal[c] += if entered_from_upper { 1 } else { -1 };
        }
        bal
    }

    /// Rotation number of each component.
    pub fn component_rotations(&self) -> Result<Vec<i64>> {
        let sk = self.skeleton()?;
        Ok(self.cusp_balance(&sk).into_iter().map(|b| b / 2).collect())
    }

    pub fn rotation_number(&self) -> Result<i64> {
        Ok(self.component_rotations()?.iter().sum())
    }

    /// Grading modulus `2r` (gcd over components), 0 for integer gradings.
    pub fn grading_modulus(&self) -> Result<i64> {
        fn gcd(a: i64, b: i64) -> i64 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a % b)
            }
        }
        Ok(self.component_rotations()?.into_iter().fold(0, |g, r| gcd(g, 2 * r)))
    }

    /// Maslov potential of every arc, reduced mod the grading modulus.
    ///
    /// At each cusp the upper arc sits one above the lower arc. The first
    /// arc of every component is given potential 0.
    pub fn maslov_potentials(&self, sk: &Skeleton) -> Result<Vec<i64>> {
        let m = self.grading_modulus()?;
        let n = sk.arcs.len();
        // Adjacency through cusps: (neighbour, offset neighbour - self).
        let mut adj: Vec<Vec<(ArcId, i64)>> = vec![Vec::new(); n];
        for (k, ev) in self.events.iter().enumerate() {
            if matches!(ev, Event::Crossing { .. }) {
                continue;
            }
            let (lo, hi) = sk.pairs[k];
            adj[lo].push((hi, 1));
            adj[hi].push((lo, -1));
        }
        let reduce = |v: i64| if m == 0 { v } else { v.rem_euclid(m) };
        let mut mu: Vec<Option<i64>> = vec![None; n];
        for start in 0..n {
            if mu[start].is_some() {
                continue;
            }
            mu[start] = Some(0);
            let mut stack = vec![start];
            while let Some(a) = stack.pop() {
                let base = mu[a].expect("visited");
                for &(b, off) in &adj[a] {
                    let want = reduce(base + off);
                    match mu[b] {
                        None => {
                            mu[b] = Some(want);
                            stack.push(b);
                        }
                        Some(have) if have != want => {
                            return Err(Error::InvalidFront(format!(
                                "inconsistent Maslov potential on arc {b}: {have} vs {want}"
                            )));
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        Ok(mu.into_iter().map(|v| v.expect("all arcs visited")).collect())
    }

    /// Converts a grid into its front word.
    pub fn from_grid(d: &GridDiagram) -> Front {
        from_grid_geometry(d)
    }
}

/// A front arc as a polyline in rotated coordinates, left to right.
struct Polyline {
    points: Vec<(i64, i64)>,
}

impl Polyline {
    fn z_at(&self, x: i64) -> i64 {
        for w in self.points.windows(2) {
            let ((x0, z0), (x1, z1)) = (w[0], w[1]);
            if x0 <= x && x <= x1 {
                let slope = (z1 - z0).signum();
                return z0 + slope * (x - x0);
            }
        }
        panic!("x = {x} outside arc");
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Seg {
    Col(usize),
    Row(usize),
}

fn rot(col: usize, row: usize) -> (i64, i64) {
    (col as i64 - row as i64, col as i64 + row as i64)
}

fn from_grid_geometry(d: &GridDiagram) -> Front {
    use std::collections::HashMap;

    struct GeoArc {
        line: Polyline,
        rightward: bool,
    }
    let mut geo: Vec<GeoArc> = Vec::new();
    let mut arc_of_seg: HashMap<Seg, usize> = HashMap::new();
    // Cusp point -> (arc ids) touching it.
    let mut cusp_arcs: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut cusps: Vec<((i64, i64), bool)> = Vec::new(); // (point, is_left)

    for comp in d.traversal() {
        let n = comp.len();
        let kind = |i: usize| d.corner_kind(comp[i].col, comp[i].row);
        let start = (0..n).find(|&i| kind(i) != CornerKind::Smooth).expect("a closed front has cusps");
        let mut i = start;
        loop {
            // Walk from cusp i to the next cusp.
            let mut pts = vec![rot(comp[i].col, comp[i].row)];
            let mut segs = Vec::new();
            let mut j = i;
            loop {
                let next = (j + 1) % n;
                let (a, b) = (comp[j], comp[next]);
                segs.push(if a.col == b.col { Seg::Col(a.col) } else { Seg::Row(a.row) });
                pts.push(rot(b.col, b.row));
                j = next;
                if kind(j) != CornerKind::Smooth {
                    break;
                }
            }
            let rightward = kind(i) == CornerKind::LeftCusp;
            if !rightward {
                pts.reverse();
            }
            let id = geo.len();
            for s in segs {
                arc_of_seg.insert(s, id);
            }
            let (first, last) = (pts[0], *pts.last().expect("nonempty"));
            cusp_arcs.entry(first).or_default().push(id);
            cusp_arcs.entry(last).or_default().push(id);
            geo.push(GeoArc { line: Polyline { points: pts }, rightward });
            i = j;
            if i == start {
                break;
            }
        }
        for c in &comp {
            match d.corner_kind(c.col, c.row) {
                CornerKind::LeftCusp => cusps.push((rot(c.col, c.row), true)),
                CornerKind::RightCusp => cusps.push((rot(c.col, c.row), false)),
                CornerKind::Smooth => {}
            }
        }
    }

    enum Raw {
        Left(usize, usize), // lower, upper
        Right(usize, usize),
        Cross(usize, usize),
    }
    let mut raw: Vec<((i64, i64), Raw)> = Vec::new();
    for &(p, is_left) in &cusps {
        let ids = &cusp_arcs[&p];
        debug_assert_eq!(ids.len(), 2);
        let (a, b) = (ids[0], ids[1]);
        // Compare the z of the two arcs one step away from the cusp.
        let probe = if is_left { p.0 + 1 } else { p.0 - 1 };
        let (lo, hi) = if geo[a].line.z_at(probe) < geo[b].line.z_at(probe) { (a, b) } else { (b, a) };
        raw.push((p, if is_left { Raw::Left(lo, hi) } else { Raw::Right(lo, hi) }));
    }
    for c in d.crossings() {
        let (a, b) = (arc_of_seg[&Seg::Col(c.col)], arc_of_seg[&Seg::Row(c.row)]);
        raw.push((rot(c.col, c.row), Raw::Cross(a, b)));
    }
    // Lexicographic (x, z) order is a generic tilt of the front.
    raw.sort_by_key(|(p, _)| *p);

    let mut cur: Vec<usize> = Vec::new();
    let mut events = Vec::with_capacity(raw.len());
    let position = |cur: &[usize], id: usize| cur.iter().position(|&a| a == id).expect("active arc");
    for ((x, z), r) in raw {
        match r {
            Raw::Left(lo, hi) => {
                let pos = cur.iter().filter(|&&a| geo[a].line.z_at(x) < z).count();
                cur.insert(pos, hi);
                cur.insert(pos, lo);
                events.push(Event::LeftCusp { pos, upper_rightward: geo[hi].rightward });
            }
            Raw::Cross(a, b) => {
                let (pa, pb) = (position(&cur, a), position(&cur, b));
                assert_eq!(pa.abs_diff(pb), 1, "crossing strands must be adjacent");
                let pos = pa.min(pb);
                cur.swap(pos, pos + 1);
                events.push(Event::Crossing { pos });
            }
            Raw::Right(lo, hi) => {
                let (pl, ph) = (position(&cur, lo), position(&cur, hi));
                assert_eq!(ph, pl + 1, "right cusp strands must be adjacent");
                cur.drain(pl..pl + 2);
                events.push(Event::RightCusp { pos: pl });
            }
        }
    }
    Front { events }
}
