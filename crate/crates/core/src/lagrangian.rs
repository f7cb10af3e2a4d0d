//! Chord-generic Lagrangian projections obtained by resolving fronts.
//!
//! Resolution turns every front crossing into a crossing and every right
//! cusp into a small loop with one crossing; left cusps become smooth.
//! Crossings are named `c1, c2, ...` in left-to-right order of the front.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dga::DiskSet;
use crate::error::{Error, Result};
use crate::front::{Event, Front, Skeleton};
use crate::grid::GridDiagram;
use crate::lp::{q, Cmp, LinearProgram, LpOutcome, Q};

/// Counterclockwise slot order around a crossing.
pub const SLOTS: [&str; 4] = ["ne", "nw", "sw", "se"];
const NE: usize = 0;
const NW: usize = 1;
const SW: usize = 2;
const SE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingKind {
    Front,
    RightCusp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strand {
    Over,
    Under,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub dir: String,
    pub strand: Strand,
    /// Reeb sign of the quadrant between this slot and the next one counterclockwise.
    pub quadrant: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub id: String,
    pub kind: CrossingKind,
    /// Index of the originating event in the front word.
    pub event: usize,
    pub sign: i32,
    pub degree: i64,
    pub slots: [Slot; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SlotRef {
    pub crossing: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcLink {
    pub from: SlotRef,
    pub to: SlotRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagrangianDiagram {
    pub crossings: Vec<Crossing>,
    pub arcs: Vec<ArcLink>,
    pub heights: BTreeMap<String, Q>,
    pub modulus: i64,
    pub front: Front,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    crossings: Vec<Crossing>,
    arcs: Vec<ArcLink>,
    heights: BTreeMap<String, String>,
    modulus: i64,
    front: Front,
}

fn rational_to_string(v: &Q) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

fn rational_from_str(s: &str) -> Result<Q> {
    let (n, d) = s.split_once('/').ok_or_else(|| Error::Malformed(format!("rational {s:?}")))?;
    let parse = |t: &str| t.trim().parse::<BigInt>().map_err(|e| Error::Malformed(format!("{t:?}: {e}")));
    let d = parse(d)?;
    if d.is_zero() {
        return Err(Error::Malformed(format!("zero denominator in {s:?}")));
    }
    Ok(Q::new(parse(n)?, d))
}

fn slots(over: [bool; 4], reeb: [i8; 4]) -> [Slot; 4] {
    std::array::from_fn(|i| Slot {
        dir: SLOTS[i].to_string(),
        strand: if over[i] { Strand::Over } else { Strand::Under },
        quadrant: reeb[i],
    })
}

impl LagrangianDiagram {
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.crossings.iter().position(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        let wire = Wire {
            crossings: self.crossings.clone(),
            arcs: self.arcs.clone(),
            heights: self.heights.iter().map(|(k, v)| (k.clone(), rational_to_string(v))).collect(),
            modulus: self.modulus,
            front: self.front.clone(),
        };
        serde_json::to_string(&wire).expect("diagram serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let w: Wire = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let heights = w
            .heights
            .iter()
            .map(|(k, v)| Ok((k.clone(), rational_from_str(v)?)))
            .collect::<Result<_>>()?;
        let d = LagrangianDiagram { crossings: w.crossings, arcs: w.arcs, heights, modulus: w.modulus, front: w.front };
        d.validate()?;
        Ok(d)
    }

    /// Checks the incidence structure and heights.
    pub fn validate(&self) -> Result<()> {
        let mut used = BTreeSet::new();
        for a in &self.arcs {
            for s in [a.from, a.to] {
                if s.crossing >= self.crossings.len() || s.slot >= 4 {
                    return Err(Error::InvalidFront(format!("arc endpoint {s:?} out of range")));
                }
                if !used.insert(s) {
                    return Err(Error::InvalidFront(format!("slot {s:?} used twice")));
                }
            }
        }
        if used.len() != 4 * self.crossings.len() {
            return Err(Error::InvalidFront(format!(
                "{} of {} slots attached",
                used.len(),
                4 * self.crossings.len()
            )));
        }
        for c in &self.crossings {
            match self.heights.get(&c.id) {
                Some(h) if *h > Q::zero() => {}
                _ => return Err(Error::InvalidFront(format!("crossing {} lacks a positive height", c.id))),
            }
        }
        Ok(())
    }
}

/// Resolves a grid's front into a Lagrangian diagram.
pub fn ng_resolve(d: &GridDiagram) -> LagrangianDiagram {
    resolve_front(&Front::from_grid(d)).expect("grid fronts are valid")
}

/// Resolves an arbitrary valid front.
pub fn resolve_front(front: &Front) -> Result<LagrangianDiagram> {
    let sk = front.skeleton()?;
    let modulus = front.grading_modulus()?;
    let mu = front.maslov_potentials(&sk)?;
    let reduce = |v: i64| if modulus == 0 { v } else { v.rem_euclid(modulus) };

    let mut crossings = Vec::new();
    let mut index_of_event = vec![usize::MAX; front.events.len()];
    for (k, ev) in front.events.iter().enumerate() {
        let (lo, hi) = sk.pairs[k];
        let (kind, degree) = match ev {
            Event::LeftCusp { .. } => continue,
            Event::Crossing { .. } => (CrossingKind::Front, reduce(mu[hi] - mu[lo])),
            Event::RightCusp { .. } => (CrossingKind::RightCusp, reduce(1)),
        };
        index_of_event[k] = crossings.len();
        crossings.push(Crossing {
            id: format!("c{}", crossings.len() + 1),
            kind,
            event: k,
            sign: Front::crossing_sign(&sk, k),
            degree,
            // The strand descending to the right (upper on the left) is over;
            // left and right quadrants carry positive Reeb sign.
            slots: slots([false, true, false, true], [-1, 1, -1, 1]),
        });
    }

    // Heights double from left to right. Negative corners always sit left of
    // the positive corner, so most disks get positive area, but a corner can
    // repeat; consumers that need valid heights solve for them instead.
    let heights = crossings
        .iter()
        .enumerate()
        .map(|(i, c)| (c.id.clone(), Q::from_integer(BigInt::one() << i)))
        .collect();

    let arcs = link_slots(front, &sk, &index_of_event);
    let d = LagrangianDiagram { crossings, arcs, heights, modulus, front: front.clone() };
    debug_assert!(d.validate().is_ok());
    Ok(d)
}

/// Follows every component and links exit slots to the next entry slot.
fn link_slots(front: &Front, sk: &Skeleton, index_of_event: &[usize]) -> Vec<ArcLink> {
    let crossings_on = |arc: usize| -> Vec<usize> {
        let a = &sk.arcs[arc];
        (a.left_event + 1..a.right_event)
            .filter(|&k| matches!(front.events[k], Event::Crossing { .. }) && (sk.pairs[k].0 == arc || sk.pairs[k].1 == arc))
            .collect()
    };
    let mut links = Vec::new();
    let mut done = vec![false; sk.arcs.len()];
    for (k, ev) in front.events.iter().enumerate() {
        let Event::LeftCusp { .. } = ev else { continue };
        let (lo, hi) = sk.pairs[k];
        if done[lo] {
            continue;
        }
        let start = if sk.arcs[lo].rightward { lo } else { hi };
        // (crossing, in slot, out slot)
        let mut visits: Vec<(usize, usize, usize)> = Vec::new();
        let mut cur = start;
        loop {
            done[cur] = true;
            for e in crossings_on(cur) {
                let lower_left = sk.pairs[e].0 == cur;
                visits.push((index_of_event[e], if lower_left { SW } else { NW }, if lower_left { NE } else { SE }));
            }
            let cusp = sk.arcs[cur].right_event;
            let (clo, chi) = sk.pairs[cusp];
            let partner = if clo == cur { chi } else { clo };
            let x = index_of_event[cusp];
            if cur == clo {
                visits.push((x, SW, NE));
                visits.push((x, SE, NW));
            } else {
                visits.push((x, NW, SE));
                visits.push((x, NE, SW));
            }
            done[partner] = true;
            for e in crossings_on(partner).into_iter().rev() {
                let lower_left = sk.pairs[e].0 == partner;
                visits.push((index_of_event[e], if lower_left { NE } else { SE }, if lower_left { SW } else { NW }));
            }
            let lc = sk.arcs[partner].left_event;
            let (llo, lhi) = sk.pairs[lc];
            cur = if llo == partner { lhi } else { llo };
            if cur == start {
                break;
            }
        }
        for i in 0..visits.len() {
            let (c, _, out) = visits[i];
            let (n, inn, _) = visits[(i + 1) % visits.len()];
            links.push(ArcLink { from: SlotRef { crossing: c, slot: out }, to: SlotRef { crossing: n, slot: inn } });
        }
    }
    links
}

/// Sum of crossing signs.
pub fn tb_signed_chord_sum(l: &LagrangianDiagram) -> i64 {
    l.crossings.iter().map(|c| c.sign as i64).sum()
}

/// Crossings whose height can be made arbitrarily small relative to every
/// disk's area (normalized to at least 1) while all heights stay positive.
///
/// The system `h > 0, h(a) - sum h(b_i) >= 1` is first shown feasible, by the
/// diagram's own heights when every disk has positive area under them and
/// by an exact LP otherwise. Given feasibility, `min h(c)` is 0 exactly when
/// `c` is no disk's positive corner: lowering `h(c)` only relaxes the
/// constraints in which it appears negatively.
pub fn contractible_crossings(l: &LagrangianDiagram, disks: &DiskSet) -> BTreeSet<String> {
    if !heights_feasible(l, disks) {
        return BTreeSet::new();
    }
    let positive: BTreeSet<&str> = disks.disks.iter().map(|d| d.positive.as_str()).collect();
    l.crossings.iter().filter(|c| !positive.contains(c.id.as_str())).map(|c| c.id.clone()).collect()
}

fn area_system(l: &LagrangianDiagram, disks: &DiskSet) -> LinearProgram {
    let n = l.crossings.len();
    let idx: BTreeMap<&str, usize> = l.crossings.iter().enumerate().map(|(i, c)| (c.id.as_str(), i)).collect();
    let mut lp = LinearProgram::new(n);
    for d in &disks.disks {
        let mut row: BTreeMap<usize, Q> = BTreeMap::new();
        *row.entry(idx[d.positive.as_str()]).or_insert_with(Q::zero) += q(1);
        for b in &d.negatives {
            *row.entry(idx[b.as_str()]).or_insert_with(Q::zero) -= q(1);
        }
        lp.add(row.into_iter().filter(|(_, v)| !v.is_zero()).collect(), Cmp::Ge, q(1));
    }
    lp
}

/// Whether some positive heights give every disk positive area.
pub fn heights_feasible(l: &LagrangianDiagram, disks: &DiskSet) -> bool {
    let area = |d: &crate::dga::Disk| {
        let mut a = l.heights[&d.positive].clone();
        for b in &d.negatives {
            a -= &l.heights[b];
        }
        a
    };
    if disks.disks.iter().all(|d| area(d) > Q::zero()) {
        return true;
    }
    // Strict positivity is feasible iff the scaled system with h >= 1 is.
    let mut strict = area_system(l, disks);
    for i in 0..l.crossings.len() {
        strict.add(vec![(i, q(1))], Cmp::Ge, q(1));
    }
    strict.is_feasible()
}

/// Contractibility decided by one LP minimization per crossing.
pub fn contractible_crossings_lp(l: &LagrangianDiagram, disks: &DiskSet) -> BTreeSet<String> {
    let base = area_system(l, disks);
    let mut strict = base.clone();
    for i in 0..l.crossings.len() {
        strict.add(vec![(i, q(1))], Cmp::Ge, q(1));
    }
    if !strict.is_feasible() {
        return BTreeSet::new();
    }
    l.crossings
        .iter()
        .enumerate()
        .filter(|(i, _)| matches!(base.minimize(&[(*i, q(1))]), LpOutcome::Optimal { value, .. } if value.is_zero()))
        .map(|(_, c)| c.id.clone())
        .collect()
}
