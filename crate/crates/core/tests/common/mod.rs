// Independent oracles shared by the integration tests. Nothing here calls
// the library's own tb, rotation, rank or augmentation code.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use legendrian::dga::Dga;
use legendrian::grid::{torus_knot_grid, GridDiagram};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub const CORPUS_SEED: u64 = 0x5eed_2024;

/// A random single-component grid: `o[i] = x[τ(i)]` for an n-cycle τ.
pub fn random_knot(rng: &mut impl Rng, n: usize) -> GridDiagram {
    let mut x: Vec<usize> = (0..n).collect();
    x.shuffle(rng);
    let mut cyc: Vec<usize> = (0..n).collect();
    cyc.shuffle(rng);
    let mut tau = vec![0; n];
    for i in 0..n {
        tau[cyc[i]] = cyc[(i + 1) % n];
    }
    let o = (0..n).map(|i| x[tau[i]]).collect();
    GridDiagram::new(x, o).expect("an n-cycle gives a knot")
}

pub fn random_grids(seed: u64, count: usize, max_n: usize) -> Vec<GridDiagram> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=max_n);
            random_knot(&mut rng, n)
        })
        .collect()
}

/// The unknot, T3, T5, T7 and 100 random grids up to 8x8.
pub fn corpus() -> Vec<(String, GridDiagram)> {
    let mut out = vec![("unknot".to_string(), GridDiagram::unknot())];
    for k in 1..=3 {
        out.push((format!("T{}", 2 * k + 1), torus_knot_grid(k).unwrap()));
    }
    for (i, d) in random_grids(CORPUS_SEED, 100, 8).into_iter().enumerate() {
        out.push((format!("random{i}"), d));
    }
    out
}

/// The closed polyline of the front, oriented like the grid, in
/// `(x, z) = (col - row, col + row)` scaled by 4.
fn front_polyline(d: &GridDiagram) -> Vec<(i64, i64)> {
    let x_of_row: HashMap<usize, usize> = d.x.iter().enumerate().map(|(c, &r)| (r, c)).collect();
    let mut pts = Vec::new();
    let mut col = 0;
    loop {
        pts.push((col, d.x[col]));
        pts.push((col, d.o[col]));
        col = x_of_row[&d.o[col]];
        if col == 0 {
            break;
        }
    }
    assert_eq!(pts.len(), 2 * d.g, "oracle expects a knot");
    if d.orientation == legendrian::grid::Orientation::Reversed {
        pts.reverse();
    }
    pts.into_iter().map(|(c, r)| (4 * (c as i64 - r as i64), 4 * (c as i64 + r as i64))).collect()
}

fn cross(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

fn sub(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
    (a.0 - b.0, a.1 - b.1)
}

/// Strict interior intersection of two non-parallel segments.
fn meets(a0: (i64, i64), a1: (i64, i64), b0: (i64, i64), b1: (i64, i64)) -> bool {
    let (da, db) = (sub(a1, a0), sub(b1, b0));
    let den = cross(da, db);
    if den == 0 {
        return false;
    }
    let w = sub(b0, a0);
    let (t, u) = (cross(w, db), cross(w, da));
    let inside = |num: i64| if den > 0 { 0 < num && num < den } else { den < num && num < 0 };
    inside(t) && inside(u)
}

/// tb as the linking number of the front with its push-off in z. At a
/// crossing the strand of smaller slope is in front.
pub fn pushoff_tb(d: &GridDiagram) -> i64 {
    let p = front_polyline(d);
    let segs: Vec<_> = (0..p.len()).map(|i| (p[i], p[(i + 1) % p.len()])).collect();
    let lift = |q: (i64, i64)| (q.0, q.1 + 1);
    let slope = |s: &((i64, i64), (i64, i64))| {
        let v = sub(s.1, s.0);
        v.1.signum() * v.0.signum()
    };
    let mut total = 0;
    for a in &segs {
        let a2 = (lift(a.0), lift(a.1));
        for b in &segs {
            if !meets(a2.0, a2.1, b.0, b.1) {
                continue;
            }
            let (over, under) = if slope(&a2) < slope(b) { (a2, *b) } else { (*b, a2) };
            total += cross(sub(over.1, over.0), sub(under.1, under.0)).signum();
        }
    }
    assert_eq!(total % 2, 0);
    total / 2
}

/// Half of (downward cusps - upward cusps), read off the polyline: a cusp is
/// where x reverses, and it is downward when z decreases through it.
pub fn cusp_rotation(d: &GridDiagram) -> i64 {
    let p = front_polyline(d);
    let n = p.len();
    let mut twice = 0;
    for i in 0..n {
        let inc = sub(p[i], p[(i + n - 1) % n]);
        let out = sub(p[(i + 1) % n], p[i]);
        if inc.0.signum() != out.0.signum() {
            twice += if inc.1 < 0 { 1 } else { -1 };
        }
    }
    twice / 2
}

fn deg(a: &Dga, g: usize) -> i64 {
    let d = a.generators[g].degree;
    if a.modulus == 0 {
        d
    } else {
        d.rem_euclid(a.modulus)
    }
}

/// Graded augmentations by trying every assignment on every generator.
pub fn brute_augmentations(a: &Dga) -> Vec<Vec<bool>> {
    let n = a.generators.len();
    assert!(n <= 20, "brute force over {n} generators");
    (0u32..1 << n)
        .map(|mask| (0..n).map(|g| mask >> g & 1 == 1).collect::<Vec<bool>>())
        .filter(|e| (0..n).all(|g| !e[g] || deg(a, g) == 0))
        .filter(|e| {
            a.differential.iter().all(|p| p.0.iter().filter(|w| w.iter().all(|&c| e[c])).count() % 2 == 0)
        })
        .collect()
}

/// Rank over GF(2) by plain row reduction.
pub fn naive_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c]) else { continue };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] {
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Linearized homology by substituting `c -> c + ε(c)` in every word,
/// expanding, and keeping the words of length one.
pub fn linearized_dims(a: &Dga, e: &[bool]) -> BTreeMap<i64, usize> {
    let n = a.generators.len();
    // lin[g][b]: coefficient of b in the linear part of d g.
    let mut lin = vec![vec![false; n]; n];
    for (g, p) in a.differential.iter().enumerate() {
        for w in &p.0 {
            // Only one letter may stay a letter; the rest become their values.
            for j in 0..w.len() {
                if (0..w.len()).all(|i| i == j || e[w[i]]) {
                    lin[g][w[j]] ^= true;
                }
            }
        }
    }
    let mut by_deg: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for g in 0..n {
        by_deg.entry(deg(a, g)).or_default().push(g);
    }
    let reduce = |k: i64| if a.modulus == 0 { k } else { k.rem_euclid(a.modulus) };
    let block = |k: i64| -> usize {
        // Map from degree k to degree k - 1.
        let (Some(src), Some(dst)) = (by_deg.get(&reduce(k)), by_deg.get(&reduce(k - 1))) else { return 0 };
        naive_rank(src.iter().map(|&g| dst.iter().map(|&b| lin[g][b]).collect()).collect())
    };
    by_deg.iter().map(|(&k, gens)| (k, gens.len() - block(k) - block(k + 1))).collect()
}

pub fn euler(dims: &BTreeMap<i64, usize>) -> i64 {
    dims.iter().map(|(&k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
}

/// `d∘d` on every generator, expanded with multiplicities and reduced mod 2.
pub fn d_squared_nonzero(a: &Dga) -> Vec<String> {
    let mut bad = Vec::new();
    for (g, p) in a.differential.iter().enumerate() {
        let mut count: HashMap<Vec<usize>, u32> = HashMap::new();
        for w in &p.0 {
            for j in 0..w.len() {
                for m in &a.differential[w[j]].0 {
                    let mut v = w[..j].to_vec();
                    v.extend(m);
                    v.extend(&w[j + 1..]);
                    *count.entry(v).or_default() += 1;
                }
            }
        }
        if count.values().any(|c| c % 2 == 1) {
            bad.push(a.generators[g].name.clone());
        }
    }
    bad
}
