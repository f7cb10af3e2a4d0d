//! The Chekanov-Eliashberg algebra of a resolved front, over Z2.
//!
//! The resolution's Lagrangian projection is the front itself with each
//! left cusp smoothed and each right cusp replaced by a crossing and a small
//! loop, so strand order over any vertical line is the front's. A disk is
//! swept leftward from its positive corner as a set of sheets, intervals
//! between two strands. Crossings may bend a sheet edge through a top or
//! bottom quadrant (a negative corner), a right cusp's loop may part a sheet
//! in two, and a sheet closes off at a left cusp whose eye it fills.
//! Each right cusp additionally bounds its loop, a disk with no negative
//! corners.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::front::Event;
use crate::lagrangian::{CrossingKind, LagrangianDiagram};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Which of the four quadrants at a crossing a corner fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrant {
    Left,
    Right,
    Top,
    Bottom,
}

/// How a disk sits over the diagram: enough to redraw it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Certificate {
    /// Left cusps where a sheet of the disk starts.
    pub births: Vec<usize>,
    /// Quadrant filled at the positive corner.
    pub quadrant: Quadrant,
    /// Negative corners as `(event, quadrant)`, counterclockwise.
    pub corners: Vec<(usize, Quadrant)>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Disk {
    pub positive: String,
    /// Negative corners in counterclockwise order from the positive corner.
    pub negatives: Vec<String>,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskSet {
    pub disks: Vec<Disk>,
}

/// One step of the resolved diagram, read left to right. A left cusp is a
/// smooth fold, a right cusp a crossing followed by a fold closing its loop.
#[derive(Debug, Clone, Copy)]
enum Op {
    Birth { pos: usize, event: usize },
    Cross { pos: usize, crossing: usize, event: usize },
    Death { pos: usize },
}

/// A thread end: boundary thread id and whether it is the right end.
type End = (usize, bool);

/// An interval of the disk over a vertical line, between strand positions
/// `lo < hi`, with the boundary threads running along them.
#[derive(Debug, Clone, Copy)]
struct Sheet {
    lo: usize,
    hi: usize,
    bot: usize,
    top: usize,
}

/// A disk under construction, swept leftward from its positive corner.
///
/// Read left to right, a disk's sheets start at left cusps, merge around
/// right cusps from outside, end once at the positive corner and never
/// split: sheets = starts - merges - ends + splits, while starts - merges
/// is the Euler characteristic 1. Leftward there is one sheet at first,
/// sheets only split, and every completed sweep is a disk.
#[derive(Debug, Clone, Default)]
struct Partial {
    sheets: Vec<Sheet>,
    /// Corners along each thread, right to left: `(crossing, event, quadrant)`.
    threads: Vec<Vec<(usize, usize, Quadrant)>>,
    joins: Vec<(End, End)>,
    births: Vec<usize>,
}

impl Partial {
    fn thread(&mut self) -> usize {
        self.threads.push(Vec::new());
        self.threads.len() - 1
    }
}

struct Search<'a> {
    l: &'a LagrangianDiagram,
    ops: Vec<Op>,
    budget: u64,
    nodes: AtomicU64,
}

impl<'a> Search<'a> {
    fn new(l: &'a LagrangianDiagram, budget: u64) -> Result<Self> {
        l.front.skeleton()?;
        let mut crossing_of_event = vec![usize::MAX; l.front.events.len()];
        for (i, c) in l.crossings.iter().enumerate() {
            crossing_of_event[c.event] = i;
        }
        let mut ops = Vec::new();
        for (event, e) in l.front.events.iter().enumerate() {
            match *e {
                Event::LeftCusp { pos, .. } => ops.push(Op::Birth { pos, event }),
                Event::Crossing { pos } => ops.push(Op::Cross { pos, crossing: crossing_of_event[event], event }),
                Event::RightCusp { pos } => {
                    ops.push(Op::Cross { pos, crossing: crossing_of_event[event], event });
                    ops.push(Op::Death { pos });
                }
            }
        }
        Ok(Search { l, ops, budget, nodes: AtomicU64::new(0) })
    }

    fn tick(&self, ci: usize) -> Result<()> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) + 1 > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget, corner: self.l.crossings[ci].id.clone() });
        }
        Ok(())
    }

    /// Disks whose positive corner is crossing `ci`.
    fn disks_at(&self, ci: usize) -> Result<Vec<Disk>> {
        let c = &self.l.crossings[ci];
        let at = self
            .ops
            .iter()
            .position(|o| matches!(o, Op::Cross { crossing, .. } if *crossing == ci))
            .expect("every crossing has an op");
        let Op::Cross { pos, .. } = self.ops[at] else { unreachable!() };
        let mut out = Vec::new();
        if c.kind == CrossingKind::RightCusp {
            // The loop: the only disk filling a right quadrant.
            out.push(Disk {
                positive: c.id.clone(),
                negatives: vec![],
                certificate: Certificate { births: vec![], quadrant: Quadrant::Right, corners: vec![] },
            });
        }
        let mut s = Partial::default();
        let (bot, top) = (s.thread(), s.thread());
        s.sheets.push(Sheet { lo: pos, hi: pos + 1, bot, top });
        self.sweep(ci, at, s, (top, true), (bot, true), &mut out)?;
        Ok(out)
    }

    /// Carries the sheets right of op `i` across it.
    fn sweep(&self, ci: usize, i: usize, s: Partial, start: End, stop: End, out: &mut Vec<Disk>) -> Result<()> {
        self.tick(ci)?;
        if s.sheets.is_empty() {
            out.push(self.finish(ci, &s, start, stop));
            return Ok(());
        }
        if i == 0 {
            return Ok(());
        }
        let mut next = Vec::new();
        match self.ops[i - 1] {
            Op::Birth { pos, event } => self.unbirth(pos, event, s, &mut next),
            Op::Cross { pos, crossing, event } => self.uncross(pos, crossing, event, s, &mut next),
            Op::Death { pos } => self.undeath(pos, s, &mut next),
        }
        for t in next {
            self.sweep(ci, i - 1, t, start, stop, out)?;
        }
        Ok(())
    }

    /// Leftward through a left cusp whose strands sit at `p`, `p + 1`.
    fn unbirth(&self, p: usize, event: usize, mut s: Partial, next: &mut Vec<Partial>) {
        let mut kept = Vec::with_capacity(s.sheets.len());
        for sh in std::mem::take(&mut s.sheets) {
            if (sh.lo, sh.hi) == (p, p + 1) {
                s.joins.push(((sh.bot, false), (sh.top, false)));
                s.births.push(event);
            } else if sh.hi < p {
                kept.push(sh);
            } else if sh.lo > p + 1 {
                kept.push(Sheet { lo: sh.lo - 2, hi: sh.hi - 2, ..sh });
            } else if sh.lo < p && sh.hi > p + 1 {
                kept.push(Sheet { hi: sh.hi - 2, ..sh });
            } else {
                return;
            }
        }
        s.sheets = kept;
        next.push(s);
    }

    /// Leftward through a crossing of strands `p`, `p + 1`. Corners fill
    /// the top or bottom quadrant; a left or right one would be a second
    /// positive corner.
    fn uncross(&self, p: usize, ci: usize, event: usize, s: Partial, next: &mut Vec<Partial>) {
        let mut acc = vec![Partial { sheets: Vec::with_capacity(s.sheets.len()), ..s.clone() }];
        for sh in &s.sheets {
            let los: &[(usize, bool)] = if sh.lo == p + 1 {
                &[(p, false), (p + 1, true)]
            } else if sh.lo == p {
                &[(p + 1, false)]
            } else {
                &[(sh.lo, false)]
            };
            let his: &[(usize, bool)] = if sh.hi == p {
                &[(p + 1, false), (p, true)]
            } else if sh.hi == p + 1 {
                &[(p, false)]
            } else {
                &[(sh.hi, false)]
            };
            let mut grown = Vec::with_capacity(acc.len() * los.len() * his.len());
            for t in &acc {
                for &(lo, lc) in los {
                    for &(hi, hc) in his {
                        if lo >= hi || (lo, hi) == (p, p + 1) {
                            continue;
                        }
                        let mut t = t.clone();
                        if lc {
                            t.threads[sh.bot].push((ci, event, Quadrant::Top));
                        }
                        if hc {
                            t.threads[sh.top].push((ci, event, Quadrant::Bottom));
                        }
                        t.sheets.push(Sheet { lo, hi, ..*sh });
                        grown.push(t);
                    }
                }
            }
            acc = grown;
        }
        next.extend(acc);
    }

    /// Leftward into the loop of a right cusp, whose two strands appear at
    /// `p`, `p + 1`. A sheet around the loop may part into one below and
    /// one above it.
    fn undeath(&self, p: usize, s: Partial, next: &mut Vec<Partial>) {
        let mut acc = vec![Partial { sheets: Vec::with_capacity(s.sheets.len() + 1), ..s.clone() }];
        for sh in &s.sheets {
            if sh.hi < p {
                acc.iter_mut().for_each(|t| t.sheets.push(*sh));
            } else if sh.lo >= p {
                acc.iter_mut().for_each(|t| t.sheets.push(Sheet { lo: sh.lo + 2, hi: sh.hi + 2, ..*sh }));
            } else {
                let mut grown = Vec::with_capacity(2 * acc.len());
                for t in acc {
                    let mut split = t.clone();
                    let (a, b) = (split.thread(), split.thread());
                    split.joins.push(((a, true), (b, true)));
                    split.sheets.push(Sheet { hi: p, top: a, ..*sh });
                    split.sheets.push(Sheet { lo: p + 1, hi: sh.hi + 2, bot: b, ..*sh });
                    grown.push(split);
                    let mut pass = t;
                    pass.sheets.push(Sheet { hi: sh.hi + 2, ..*sh });
                    grown.push(pass);
                }
                acc = grown;
            }
        }
        next.extend(acc);
    }

    /// Reads the boundary word counterclockwise from the positive corner.
    fn finish(&self, ci: usize, s: &Partial, start: End, stop: End) -> Disk {
        let mut partner: BTreeMap<End, End> = BTreeMap::new();
        for &(a, b) in &s.joins {
            partner.insert(a, b);
            partner.insert(b, a);
        }
        let mut corners = Vec::new();
        let mut end = start;
        loop {
            let (th, right) = end;
            if right {
                corners.extend(s.threads[th].iter().copied());
            } else {
                corners.extend(s.threads[th].iter().rev().copied());
            }
            let far = (th, !right);
            if far == stop {
                break;
            }
            end = partner[&far];
        }
        let mut births = s.births.clone();
        births.sort_unstable();
        Disk {
            positive: self.l.crossings[ci].id.clone(),
            negatives: corners.iter().map(|&(c, _, _)| self.l.crossings[c].id.clone()).collect(),
            certificate: Certificate {
                births,
                quadrant: Quadrant::Left,
                corners: corners.iter().map(|&(_, e, q)| (e, q)).collect(),
            },
        }
    }
}

/// Enumerates every admissible disk, aborting past `budget` search nodes.
pub fn admissible_disks(l: &LagrangianDiagram) -> Result<DiskSet> {
    admissible_disks_with_budget(l, DEFAULT_BUDGET)
}

pub fn admissible_disks_with_budget(l: &LagrangianDiagram, budget: u64) -> Result<DiskSet> {
    let search = Search::new(l, budget)?;
    let per_corner: Vec<Result<Vec<Disk>>> =
        (0..l.crossings.len()).into_par_iter().map(|ci| search.disks_at(ci)).collect();
    let mut disks = Vec::new();
    for r in per_corner {
        disks.extend(r?);
    }
    Ok(DiskSet { disks })
}

/// A word in the generators; the empty word is the unit.
pub type Word = Vec<usize>;

/// A Z2 combination of words, with cancelled pairs removed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Poly(pub BTreeSet<Word>);

impl Poly {
    pub fn toggle(&mut self, w: Word) {
        if !self.0.remove(&w) {
            self.0.insert(w);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dga {
    pub generators: Vec<Generator>,
    /// `2r`; 0 means integer grading.
    pub modulus: i64,
    pub differential: Vec<Poly>,
}

impl Dga {
    pub fn reduce(&self, deg: i64) -> i64 {
        if self.modulus == 0 {
            deg
        } else {
            deg.rem_euclid(self.modulus)
        }
    }

    pub fn word_degree(&self, w: &[usize]) -> i64 {
        self.reduce(w.iter().map(|&g| self.generators[g].degree).sum())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Words of `d(g)` whose degree is not `|g| - 1`.
    pub fn degree_violations(&self) -> Vec<(String, Word)> {
        let mut bad = Vec::new();
        for (g, p) in self.differential.iter().enumerate() {
            let want = self.reduce(self.generators[g].degree - 1);
            for w in &p.0 {
                if self.word_degree(w) != want {
                    bad.push((self.generators[g].name.clone(), w.clone()));
                }
            }
        }
        bad
    }

    /// Applies the differential to a word by the Leibniz rule.
    pub fn d_word(&self, w: &[usize]) -> Poly {
        let mut out = Poly::default();
        for (j, &g) in w.iter().enumerate() {
            for m in &self.differential[g].0 {
                let mut v = Vec::with_capacity(w.len() + m.len());
                v.extend_from_slice(&w[..j]);
                v.extend_from_slice(m);
                v.extend_from_slice(&w[j + 1..]);
                out.toggle(v);
            }
        }
        out
    }

    pub fn word_names(&self, w: &[usize]) -> Vec<String> {
        w.iter().map(|&g| self.generators[g].name.clone()).collect()
    }

    pub fn to_value(&self) -> Value {
        let d: BTreeMap<String, Value> = self
            .generators
            .iter()
            .zip(&self.differential)
            .map(|(g, p)| {
                let words: Vec<Value> = p
                    .0
                    .iter()
                    .map(|w| if w.is_empty() { json!("1") } else { json!(self.word_names(w)) })
                    .collect();
                (g.name.clone(), Value::Array(words))
            })
            .collect();
        json!({ "generators": self.generators, "modulus": self.modulus, "d": d })
    }

    pub fn to_json(&self) -> String {
        self.to_value().to_string()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Wire {
            generators: Vec<Generator>,
            modulus: i64,
            d: BTreeMap<String, Vec<Value>>,
        }
        let w: Wire = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let index: BTreeMap<&str, usize> = w.generators.iter().enumerate().map(|(i, g)| (g.name.as_str(), i)).collect();
        let mut differential = vec![Poly::default(); w.generators.len()];
        for (name, words) in &w.d {
            let &g = index.get(name.as_str()).ok_or_else(|| Error::Malformed(format!("unknown generator {name}")))?;
            for word in words {
                let parsed = match word {
                    Value::String(s) if s == "1" => Vec::new(),
                    Value::Array(items) => items
                        .iter()
                        .map(|v| {
                            v.as_str()
                                .and_then(|s| index.get(s).copied())
                                .ok_or_else(|| Error::Malformed(format!("bad letter {v} in d({name})")))
                        })
                        .collect::<Result<_>>()?,
                    other => return Err(Error::Malformed(format!("bad word {other} in d({name})"))),
                };
                differential[g].toggle(parsed);
            }
        }
        Ok(Dga { generators: w.generators, modulus: w.modulus, differential })
    }
}

/// Builds the algebra of a resolved diagram: one generator per crossing,
/// `d(c)` summing the negative-corner words of disks with positive corner `c`.
pub fn compute_dga(l: &LagrangianDiagram) -> Result<Dga> {
    compute_dga_with_budget(l, DEFAULT_BUDGET)
}

pub fn compute_dga_with_budget(l: &LagrangianDiagram, budget: u64) -> Result<Dga> {
    let disks = admissible_disks_with_budget(l, budget)?;
    Ok(dga_from_disks(l, &disks))
}

pub fn dga_from_disks(l: &LagrangianDiagram, disks: &DiskSet) -> Dga {
    let generators: Vec<Generator> =
        l.crossings.iter().map(|c| Generator { name: c.id.clone(), degree: c.degree }).collect();
    let index: BTreeMap<&str, usize> = l.crossings.iter().enumerate().map(|(i, c)| (c.id.as_str(), i)).collect();
    let mut differential = vec![Poly::default(); generators.len()];
    for d in &disks.disks {
        let w = d.negatives.iter().map(|n| index[n.as_str()]).collect();
        differential[index[d.positive.as_str()]].toggle(w);
    }
    Dga { generators, modulus: l.modulus, differential }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DSquaredFailure {
    pub generator: String,
    pub surviving: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DSquaredReport {
    pub ok: bool,
    pub failures: Vec<DSquaredFailure>,
}

pub fn verify_d_squared(a: &Dga) -> DSquaredReport {
    let failures: Vec<DSquaredFailure> = (0..a.generators.len())
        .filter_map(|g| {
            let mut dd = Poly::default();
            for w in &a.differential[g].0 {
                for v in a.d_word(w).0 {
                    dd.toggle(v);
                }
            }
            (!dd.is_zero()).then(|| DSquaredFailure {
                generator: a.generators[g].name.clone(),
                surviving: dd.0.iter().map(|w| a.word_names(w)).collect(),
            })
        })
        .collect();
    DSquaredReport { ok: failures.is_empty(), failures }
}

/// Sum over generators of `(-1)^|c|`.
pub fn graded_chord_signature(a: &Dga) -> i64 {
    a.generators.iter().map(|g| if g.degree.rem_euclid(2) == 0 { 1 } else { -1 }).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridDiagram;
    use crate::lagrangian::ng_resolve;

    #[test]
    fn unknot_has_two_lobes_that_cancel() {
        let l = ng_resolve(&GridDiagram::unknot());
        let disks = admissible_disks(&l).unwrap();
        assert_eq!(disks.disks.len(), 2);
        assert!(disks.disks.iter().all(|d| d.positive == "c1" && d.negatives.is_empty()));
        let a = dga_from_disks(&l, &disks);
        assert_eq!(a.generators, vec![Generator { name: "c1".into(), degree: 1 }]);
        assert!(a.differential[0].is_zero());
        assert!(verify_d_squared(&a).ok);
        assert_eq!(graded_chord_signature(&a), -1);
    }

    #[test]
    fn disks_around_loops_and_doubled_eyes() {
        // A sheet parting around the loop of c4 gives d c5 its c1 c4 term;
        // covering the eye of the middle left cusp twice gives c1 c2 c3.
        let l = ng_resolve(&GridDiagram::new(vec![2, 3, 4, 1, 0], vec![1, 0, 2, 3, 4]).unwrap());
        let a = compute_dga(&l).unwrap();
        assert!(verify_d_squared(&a).ok);
        let c5 = &a.differential[a.index_of("c5").unwrap()];
        let words: Vec<Vec<String>> = c5.0.iter().map(|w| a.word_names(w)).collect();
        assert_eq!(words, vec![vec![], vec!["c1", "c2", "c3"], vec!["c1", "c4"], vec!["c3"]]);
        let doubled = admissible_disks(&l).unwrap().disks.into_iter().find(|d| d.negatives.len() == 3).unwrap();
        assert_eq!(doubled.certificate.births, vec![1, 1]);

        let l = ng_resolve(&GridDiagram::new(vec![3, 4, 2, 1, 0], vec![2, 1, 0, 3, 4]).unwrap());
        assert!(verify_d_squared(&compute_dga(&l).unwrap()).ok);
    }

    #[test]
    fn budget_is_enforced() {
        let l = ng_resolve(&GridDiagram::new(vec![0, 4, 3, 2, 1], vec![3, 2, 1, 0, 4]).unwrap());
        let err = admissible_disks_with_budget(&l, 3).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 3, .. }));
        assert!(admissible_disks_with_budget(&l, 1000).is_ok());
    }

    #[test]
    fn corrupted_dga_is_caught() {
        // d a = b c with |b| = |c| = 0 and d b = 1: d^2 a = c != 0.
        let a = Dga {
            generators: vec![
                Generator { name: "a".into(), degree: 1 },
                Generator { name: "b".into(), degree: 1 },
                Generator { name: "c".into(), degree: 0 },
            ],
            modulus: 0,
            differential: vec![Poly([vec![1, 2]].into()), Poly([vec![]].into()), Poly::default()],
        };
        let r = verify_d_squared(&a);
        assert!(!r.ok);
        assert_eq!(r.failures[0].generator, "a");
        assert_eq!(r.failures[0].surviving, vec![vec!["c".to_string()]]);
    }

    #[test]
    fn json_round_trip_uses_unit_string() {
        let a = Dga {
            generators: vec![Generator { name: "x".into(), degree: 1 }, Generator { name: "y".into(), degree: 0 }],
            modulus: 0,
            differential: vec![Poly([vec![], vec![1, 1]].into()), Poly::default()],
        };
        let text = a.to_json();
        assert!(text.contains("\"1\""), "{text}");
        assert_eq!(Dga::from_json(&text).unwrap(), a);
    }
}
