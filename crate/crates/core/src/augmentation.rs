//! Graded augmentations and linearized homology over Z2.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::dga::Dga;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Values of a graded augmentation on the generators (index-aligned).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Augmentation {
    pub values: Vec<bool>,
}

impl Augmentation {
    pub fn zero(n: usize) -> Self {
        Augmentation { values: vec![false; n] }
    }

    /// Value on a word; the empty word maps to 1.
    pub fn on_word(&self, w: &[usize]) -> bool {
        w.iter().all(|&g| self.values[g])
    }

    pub fn support(&self, a: &Dga) -> Vec<String> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v)
            .map(|(g, _)| a.generators[g].name.clone())
            .collect()
    }
}

/// First generator `g` with `e(d g) = 1`, if any.
pub fn violated_generator(a: &Dga, e: &Augmentation) -> Option<usize> {
    (0..a.generators.len()).find(|&g| a.differential[g].0.iter().filter(|w| e.on_word(w)).count() % 2 == 1)
}

fn degree_zero(a: &Dga) -> Vec<usize> {
    (0..a.generators.len()).filter(|&g| a.reduce(a.generators[g].degree) == 0).collect()
}

/// Every graded augmentation, by exhausting assignments on degree-0
/// generators. Order: binary counting with the first degree-0 generator
/// as the least significant bit.
pub fn enumerate_augmentations(a: &Dga) -> Vec<Augmentation> {
    let zero = degree_zero(a);
    assert!(zero.len() < 40, "{} degree-0 generators is beyond brute force", zero.len());
    let n = a.generators.len();
    let total: u64 = 1 << zero.len();
    let chunk = 1u64 << 10;
    let chunks: Vec<Vec<Augmentation>> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            (c * chunk..((c + 1) * chunk).min(total))
                .filter_map(|mask| {
                    let mut e = Augmentation::zero(n);
                    for (bit, &g) in zero.iter().enumerate() {
                        e.values[g] = mask >> bit & 1 == 1;
                    }
                    violated_generator(a, &e).is_none().then_some(e)
                })
                .collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

/// The linearized differential, one block per degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedComplex {
    /// Generator indices of each degree present.
    pub degrees: BTreeMap<i64, Vec<usize>>,
    /// `blocks[k]`: matrix from degree `k` to degree `k - 1`
    /// (rows indexed by the target generators).
    pub blocks: BTreeMap<i64, BitMatrix>,
    pub modulus: i64,
}

impl GradedComplex {
    fn reduce(&self, k: i64) -> i64 {
        if self.modulus == 0 {
            k
        } else {
            k.rem_euclid(self.modulus)
        }
    }

    pub fn dim(&self, k: i64) -> usize {
        self.degrees.get(&self.reduce(k)).map_or(0, Vec::len)
    }

    /// Block leaving degree `k` (zero matrix when absent).
    pub fn block(&self, k: i64) -> BitMatrix {
        let k = self.reduce(k);
        self.blocks
            .get(&k)
            .cloned()
            .unwrap_or_else(|| BitMatrix::zeros(self.dim(k - 1), self.dim(k)))
    }

    /// Whether every composite `d_{k-1} d_k` vanishes.
    pub fn squares_to_zero(&self) -> bool {
        self.degrees.keys().all(|&k| self.block(k - 1).mul(&self.block(k)).is_zero())
    }
}

/// Linear part of the conjugated differential `phi d phi^-1`.
pub fn linearize(a: &Dga, e: &Augmentation) -> Result<GradedComplex> {
    if let Some(g) = violated_generator(a, e) {
        return Err(Error::InvalidAugmentation { generator: a.generators[g].name.clone() });
    }
    let mut degrees: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for g in 0..a.generators.len() {
        degrees.entry(a.reduce(a.generators[g].degree)).or_default().push(g);
    }
    let slot: Vec<usize> = {
        let mut s = vec![0; a.generators.len()];
        for gens in degrees.values() {
            for (i, &g) in gens.iter().enumerate() {
                s[g] = i;
            }
        }
        s
    };
    let reduce = |k: i64| a.reduce(k);
    let dim = |k: i64| degrees.get(&reduce(k)).map_or(0, Vec::len);
    let mut blocks = BTreeMap::new();
    for (&k, gens) in &degrees {
        let mut m = BitMatrix::zeros(dim(k - 1), gens.len());
        for &g in gens {
            for w in &a.differential[g].0 {
                // Each letter survives once the others are replaced by their values.
                for (j, &b) in w.iter().enumerate() {
                    let rest = w.iter().enumerate().all(|(i, &c)| i == j || e.values[c]);
                    if rest {
                        debug_assert_eq!(a.reduce(a.generators[b].degree), reduce(k - 1));
                        m.flip(slot[b], slot[g]);
                    }
                }
            }
        }
        blocks.insert(k, m);
    }
    Ok(GradedComplex { degrees, blocks, modulus: a.modulus })
}

/// `dim ker d_k - rank d_{k+1}` for every degree carrying generators.
pub fn homology_dims(c: &GradedComplex) -> BTreeMap<i64, usize> {
    c.degrees
        .keys()
        .map(|&k| (k, c.dim(k) - c.block(k).rank() - c.block(k + 1).rank()))
        .collect()
}

/// Homology of the dual complex: `dim ker delta^k - rank delta^{k-1}` with
/// `delta^k` the transpose of `d_{k+1}`.
pub fn cohomology_dims(c: &GradedComplex) -> BTreeMap<i64, usize> {
    c.degrees
        .keys()
        .map(|&k| {
            let out = c.block(k + 1).transpose();
            let inc = c.block(k).transpose();
            (k, c.dim(k) - out.rank() - inc.rank())
        })
        .collect()
}

/// `sum_k (-1)^k dims[k]`.
pub fn euler_characteristic(dims: &BTreeMap<i64, usize>) -> i64 {
    dims.iter().map(|(&k, &d)| if k.rem_euclid(2) == 0 { d as i64 } else { -(d as i64) }).sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct PoincareEntry {
    pub aug: usize,
    pub dims: BTreeMap<i64, usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LchReport {
    pub augmentations: usize,
    pub poincare: Vec<PoincareEntry>,
}

pub fn lch_report(a: &Dga) -> Result<(Vec<Augmentation>, LchReport)> {
    let augs = enumerate_augmentations(a);
    let poincare = augs
        .iter()
        .enumerate()
        .map(|(i, e)| Ok(PoincareEntry { aug: i, dims: homology_dims(&linearize(a, e)?) }))
        .collect::<Result<_>>()?;
    Ok((augs.clone(), LchReport { augmentations: augs.len(), poincare }))
}
