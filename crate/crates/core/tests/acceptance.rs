// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any
// criterion fails.

mod common;

use std::time::{Duration, Instant};

use legendrian::augmentation::{enumerate_augmentations, euler_characteristic, homology_dims, linearize, lch_report};
use legendrian::cobordism::{
    commute, compile_script, end_dgas, filling_dim_check, les_euler_check, torus_filling_script, torus_script,
    unknot_filling_script, verify_tb_relation, CobordismRecord, Script, Step,
};
use legendrian::dga::{compute_dga, graded_chord_signature, verify_d_squared, Dga, DEFAULT_BUDGET};
use legendrian::front::Front;
use legendrian::grid::{thurston_bennequin, torus_knot_grid, GridDiagram};
use legendrian::lagrangian::{ng_resolve, tb_signed_chord_sum};
use legendrian::report::Verdict;
use legendrian::spin::{spin, spin_cobordism, theorem_tb_check, tori_pipeline, CobordismSummary, InvariantRecord};
use serde_json::{json, Value};

use common::*;

const TB_BUDGET: Duration = Duration::from_secs(10);
const TORI_BUDGET: Duration = Duration::from_secs(1);
/// Window searched when calibrating the grading offset on the unknot disk.
const SIGMA_RANGE: std::ops::RangeInclusive<i64> = -4..=4;

struct Knot {
    name: String,
    grid: GridDiagram,
    tb: i64,
    dga: Dga,
}

fn knots() -> Vec<Knot> {
    corpus()
        .into_iter()
        .map(|(name, grid)| {
            let tb = thurston_bennequin(&grid).unwrap();
            let dga = compute_dga(&ng_resolve(&grid)).unwrap();
            Knot { name, grid, tb, dga }
        })
        .collect()
}

fn stabilized_unknot() -> GridDiagram {
    GridDiagram::new(vec![1, 2, 0], vec![2, 0, 1]).unwrap()
}

fn filled(j: usize, k: usize) -> Script {
    torus_script(j, k).unwrap().with_filling(torus_filling_script(j).unwrap())
}

fn tb_change(r: &CobordismRecord) -> (i64, i64) {
    let top = r.top.thurston_bennequin().unwrap();
    let bottom = if r.is_filling() { 0 } else { r.bottom_front.thurston_bennequin().unwrap() };
    (top - bottom, -r.euler_char)
}

/// Every single-swap isotopy cylinder over the fronts of `grids`.
fn cylinders(grids: &[GridDiagram]) -> Vec<CobordismRecord> {
    let mut out = Vec::new();
    for d in grids {
        let f = Front::from_grid(d);
        for swap in 0..f.events.len().saturating_sub(1) {
            if commute(f.events[swap], f.events[swap + 1]).is_some() {
                out.push(compile_script(&Script::new(Some(d.clone()), vec![Step::Isotopy { swap }])).unwrap());
            }
        }
    }
    out
}

fn c1(ks: &[Knot]) -> (bool, String) {
    let start = Instant::now();
    let mut bad = Vec::new();
    for (name, d) in corpus() {
        let front = thurston_bennequin(&d).unwrap();
        let chords = tb_signed_chord_sum(&ng_resolve(&d));
        if front != chords || front != pushoff_tb(&d) {
            bad.push(name);
        }
    }
    let t = start.elapsed();
    let ok = bad.is_empty() && t < TB_BUDGET;
    (ok, format!("{} knots, mismatches {bad:?}, {:.3}s (limit {}s)", ks.len(), t.as_secs_f64(), TB_BUDGET.as_secs()))
}

fn c2(ks: &[Knot]) -> (bool, String) {
    let bad: Vec<_> = ks.iter().filter(|k| graded_chord_signature(&k.dga) != k.tb).map(|k| &k.name).collect();
    (bad.is_empty(), format!("{} knots, mismatches {bad:?}", ks.len()))
}

fn c3(ks: &[Knot]) -> (bool, String) {
    let bad: Vec<_> = ks
        .iter()
        .filter(|k| !verify_d_squared(&k.dga).ok || !d_squared_nonzero(&k.dga).is_empty())
        .map(|k| &k.name)
        .collect();
    let gens: usize = ks.iter().map(|k| k.dga.generators.len()).sum();
    (bad.is_empty(), format!("{} knots, {gens} generators, failures {bad:?}", ks.len()))
}

fn c4() -> (bool, String) {
    let cases = [
        ("unknot", GridDiagram::unknot(), 1),
        ("T3", torus_knot_grid(1).unwrap(), 5),
        ("stabilized unknot", stabilized_unknot(), 0),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, d, want) in cases {
        let a = compute_dga(&ng_resolve(&d)).unwrap();
        let brute = brute_augmentations(&a).len();
        let fast = enumerate_augmentations(&a).len();
        ok &= brute == want && fast == brute;
        parts.push(format!("{name}: oracle {brute}, pipeline {fast}, expected {want}"));
    }
    (ok, parts.join("; "))
}

fn c5(ks: &[Knot]) -> (bool, String) {
    let mut total = 0;
    let mut bad = Vec::new();
    for k in ks {
        for e in enumerate_augmentations(&k.dga) {
            total += 1;
            let dims = homology_dims(&linearize(&k.dga, &e).unwrap());
            if euler_characteristic(&dims) != k.tb {
                bad.push(k.name.clone());
            }
        }
    }
    (total > 0 && bad.is_empty(), format!("{total} augmentations, failures {bad:?}"))
}

fn c6() -> (bool, String) {
    let mut ok = true;
    let r = compile_script(&filled(1, 2)).unwrap();
    let (d, chi) = tb_change(&r);
    ok &= d == 2 && chi == 2;
    let mut parts = vec![format!("T3->T5: dtb {d}, -chi {chi}")];
    for j in 1..=3 {
        for k in j + 1..=4 {
            let r = compile_script(&filled(j, k)).unwrap();
            let (d, chi) = tb_change(&r);
            let rep = verify_tb_relation(&r, r.bottom_front.thurston_bennequin().unwrap(), r.top.thurston_bennequin().unwrap());
            if d != 2 * (k - j) as i64 || d != chi || rep.verdict != Verdict::Pass {
                ok = false;
                parts.push(format!("j={j} k={k}: dtb {d}, -chi {chi}, {:?}", rep.verdict));
            }
        }
    }
    let disk = compile_script(&unknot_filling_script()).unwrap();
    let (tb, chi) = tb_change(&disk);
    ok &= tb == -1 && chi == -1;
    parts.push(format!("all j<k<=4 checked; disk: tb {tb}, -chi {chi}"));
    (ok, parts.join("; "))
}

fn les(r: &CobordismRecord) -> Value {
    let (b, t) = end_dgas(r, DEFAULT_BUDGET).unwrap();
    serde_json::to_value(les_euler_check(r, &b, &t, 0).unwrap()).unwrap()
}

fn c7(ks: &[Knot]) -> (bool, String) {
    let r = compile_script(&filled(1, 2)).unwrap();
    let main = les(&r);
    let pairs = main["details"]["second_sequence"]["satisfying"].as_array().map_or(0, Vec::len);
    let mut ok = main["verdict"] == "pass" && pairs > 0;
    let grids: Vec<GridDiagram> = ks.iter().map(|k| k.grid.clone()).collect();
    let (mut checked, mut skipped, mut bad) = (0, 0, 0);
    for c in cylinders(&grids) {
        let rep = les(&c);
        if rep["details"]["augmentations"]["bottom"] == 0 {
            skipped += 1;
            continue;
        }
        checked += 1;
        let diag = rep["details"]["diagonal"]["all_hold"] == true;
        let some = rep["details"]["second_sequence"]["satisfying"].as_array().is_some_and(|a| !a.is_empty());
        if !(diag && some && rep["verdict"] == "pass") {
            bad += 1;
        }
    }
    ok &= bad == 0 && checked > 0;
    (
        ok,
        format!(
            "T3->T5: {pairs} satisfying pairs; isotopy cylinders: {checked} checked on every diagonal pair, \
             {bad} failing, {skipped} without augmentations"
        ),
    )
}

fn c8() -> (bool, String) {
    let disk = compile_script(&unknot_filling_script()).unwrap();
    let (_, top) = end_dgas(&disk, DEFAULT_BUDGET).unwrap();
    let sigmas: Vec<i64> =
        SIGMA_RANGE.filter(|&s| filling_dim_check(&disk, &top, s).unwrap().verdict.is_pass()).collect();
    let trefoil = compile_script(&torus_filling_script(1).unwrap()).unwrap();
    let (_, t) = end_dgas(&trefoil, DEFAULT_BUDGET).unwrap();
    let transfer: Vec<i64> =
        sigmas.iter().copied().filter(|&s| filling_dim_check(&trefoil, &t, s).unwrap().verdict.is_pass()).collect();
    let ok = sigmas.len() == 1 && transfer == sigmas;
    (ok, format!("calibrated sigma {sigmas:?} in {SIGMA_RANGE:?}; trefoil filling matches for {transfer:?}"))
}

fn c9() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, tb) in [("unknot", -1), ("T3", 1)] {
        let r = InvariantRecord::knot(name, tb);
        let s = spin(&r);
        let good = s.chi == 0 && s.total_betti() == 2 * r.total_betti() && s.validate().is_ok();
        ok &= good;
        parts.push(format!("spin {name}: chi {}, betti {} -> {}", s.chi, r.total_betti(), s.total_betti()));
    }
    let r = compile_script(&filled(1, 2)).unwrap();
    let spun = spin_cobordism(&CobordismSummary::from_record(&r).unwrap(), 1);
    let rep = theorem_tb_check(&spun).unwrap();
    let (lhs, rhs) = (rep.details["lhs"].clone(), rep.details["rhs"].clone());
    ok &= rep.verdict == Verdict::Pass && lhs == 0 && rhs == 0;
    parts.push(format!("spun tori: lhs {lhs}, rhs {rhs}"));
    let start = Instant::now();
    let mut failing = Vec::new();
    for j in 1..=3 {
        for k in j + 1..=4 {
            for m in 1..=3 {
                if tori_pipeline(j, k, m).map_or(true, |p| p.verdict != Verdict::Pass) {
                    failing.push((j, k, m));
                }
            }
        }
    }
    let t = start.elapsed();
    ok &= failing.is_empty() && t < TORI_BUDGET;
    parts.push(format!("18 pipelines, failing {failing:?}, {:.3}s (limit {}s)", t.as_secs_f64(), TORI_BUDGET.as_secs()));
    (ok, parts.join("; "))
}

/// Everything the library reports about the corpus and the torus family.
fn full_report() -> String {
    let mut knots = Vec::new();
    for (name, d) in corpus() {
        let a = compute_dga(&ng_resolve(&d)).unwrap();
        let (_, rep) = lch_report(&a).unwrap();
        knots.push(json!({"name": name, "dga": a.to_value(), "lch": rep}));
    }
    let mut cobordisms = Vec::new();
    for j in 1..=3 {
        for k in j + 1..=4 {
            let r = compile_script(&filled(j, k)).unwrap();
            cobordisms.push(json!({"record": r.to_value(), "les": les(&r), "pipeline": tori_pipeline(j, k, 3).unwrap()}));
        }
    }
    serde_json::to_string_pretty(&json!({"knots": knots, "cobordisms": cobordisms})).unwrap()
}

fn c10() -> (bool, String) {
    let (a, b) = (full_report(), full_report());
    (a == b, format!("{} bytes, identical: {}", a.len(), a == b))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> (bool, String) + 'a>);

fn main() {
    let ks = knots();
    let criteria: Vec<Criterion> = vec![
        ("tb double computation", Box::new(|| c1(&ks))),
        ("graded chord signature", Box::new(|| c2(&ks))),
        ("d squared vanishes", Box::new(|| c3(&ks))),
        ("augmentation counts", Box::new(c4)),
        ("linearized Euler characteristic", Box::new(|| c5(&ks))),
        ("cobordism tb relation", Box::new(c6)),
        ("long exact sequence Euler check", Box::new(|| c7(&ks))),
        ("filling dimension check", Box::new(c8)),
        ("spin calculus", Box::new(c9)),
        ("determinism", Box::new(c10)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = run();
        if !ok {
            failed += 1;
        }
        println!("{} {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
