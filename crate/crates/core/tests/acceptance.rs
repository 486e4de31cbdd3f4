//! Acceptance run: one PASS/FAIL line per criterion. Set SCHURKIT_STRETCH=1
//! to add the stretch groups to criterion 4.

use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;

use schurkit::aut::automorphism_group;
use schurkit::classify::{
    check_all, check_lemma_c3c3k, check_lemma_c4c2, check_main15, check_radical_persistence,
    check_theorem_2odd, check_theorem_8p, schur_group_verdict_from, Verdict,
};
use schurkit::constructions::{cyclotomic, decompose_basic_set, detect_generalized_wreath, dual};
use schurkit::enumeration::{canonical_form, enumerate_raw, enumerate_srings, naive_enumerate, EnumerationResult};
use schurkit::group::{abelian_groups_of_order, hall_complement, make_group, sylow_subgroup, AbelianGroup, Subgroup};
use schurkit::perm::{orbits_of, Perm, PermGroup};
use schurkit::schurity::{is_schurian, orbit_sring, scheme_automorphisms, scheme_of};
use schurkit::sring::SRing;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: schurkit::error::Error) -> String {
    e.to_string()
}

fn group(inv: &[u32]) -> AbelianGroup {
    make_group(inv).expect("valid factors")
}

fn groups_up_to(n: u64) -> Vec<AbelianGroup> {
    (2..=n).flat_map(|k| abelian_groups_of_order(k).expect("small order")).collect()
}

fn translation(g: &AbelianGroup, t: usize) -> Perm {
    Perm::from_images((0..g.order()).map(|x| g.add(x, t) as u32).collect()).expect("bijection")
}

fn order_eight_classification() -> Outcome {
    let mut notes = Vec::new();
    for inv in [vec![4u32, 2], vec![2, 2, 2]] {
        let r = check_lemma_c4c2(&group(&inv)).map_err(err)?;
        ensure(r.overlaps.is_empty() && r.uncovered.is_empty(), || {
            format!("{inv:?}: overlaps {:?}, uncovered {:?}", r.overlaps, r.uncovered)
        })?;
        for row in &r.table {
            ensure(row.structure_ok && row.present && row.identity_ok, || format!("table row {}: {row:?}", row.name))?;
        }
        let elementary = inv.len() == 3;
        ensure(r.all_cyclotomic == Some(true) || !elementary, || "an S-ring over E8 is not cyclotomic".into())?;
        ensure(r.holds, || format!("{inv:?} report does not hold"))?;
        notes.push(format!(
            "{inv:?}: {} rings, {} classes up to duality, buckets {:?}",
            r.total_srings, r.duality_classes, r.bucket_counts
        ));
    }
    Ok(notes.join("; "))
}

fn oracle_equivalence() -> Outcome {
    let mut groups = groups_up_to(8);
    groups.push(group(&[2, 4]));
    let mut total = 0;
    for g in &groups {
        let fast = enumerate_raw(g, 72).map_err(err)?;
        let slow = naive_enumerate(g).map_err(err)?;
        let canon = |v: &[SRing]| -> Result<Vec<SRing>, String> {
            let mut c: Vec<SRing> = v.iter().map(|a| canonical_form(a).map_err(err)).collect::<Result<_, _>>()?;
            c.sort();
            c.dedup();
            Ok(c)
        };
        ensure(fast == slow && canon(&fast)? == canon(&slow)?, || format!("{g}: {} vs {}", fast.len(), slow.len()))?;
        total += fast.len();
    }
    Ok(format!("{} groups, {total} rings", groups.len()))
}

fn schurian_at_three() -> Outcome {
    let mut notes = Vec::new();
    for inv in [vec![4u32, 6], vec![2, 2, 2, 3]] {
        let r = enumerate_srings(&group(&inv)).map_err(err)?;
        let v = schur_group_verdict_from(&r).map_err(err)?;
        ensure(v.is_schur_group, || format!("{inv:?}: counterexample {:?}", v.first_counterexample))?;
        notes.push(format!("{inv:?}: {}/{}", v.schurian_count, v.total_srings));
    }
    Ok(notes.join("; "))
}

fn run_checks(r: &EnumerationResult, check: fn(&SRing) -> schurkit::error::Result<Verdict>, name: &str) -> Outcome {
    let verdicts = check_all(r, check).map_err(err)?;
    let nontrivial: Vec<&SRing> = r.srings.iter().filter(|a| !a.is_trivial_ring()).collect();
    for (v, a) in verdicts.iter().zip(&nontrivial) {
        ensure(v.holds, || format!("{name} fails on {:?}", a.classes()))?;
        ensure(v.witnesses_revalidate(a).map_err(err)?, || format!("{name} witness fails on {:?}", a.classes()))?;
    }
    Ok(format!("{name} {}", verdicts.len()))
}

fn decomposition_statements() -> Outcome {
    let mut groups: Vec<(Vec<u32>, bool)> = vec![
        (vec![4, 6], true),
        (vec![2, 2, 2, 3], true),
        (vec![6, 9], false),
        (vec![3, 3, 4], false),
    ];
    if std::env::var("SCHURKIT_STRETCH").is_ok_and(|v| v == "1") {
        groups.push((vec![4, 10], true));
        groups.push((vec![3, 3, 6], false));
    }
    let mut notes = Vec::new();
    for (inv, eight_p) in groups {
        let r = enumerate_srings(&group(&inv)).map_err(err)?;
        let a = run_checks(&r, check_main15, "main15")?;
        let b = if eight_p {
            run_checks(&r, check_theorem_8p, "theorem_8p")?
        } else {
            run_checks(&r, check_theorem_2odd, "theorem_2odd")?
        };
        notes.push(format!("{inv:?}: {a}, {b}"));
    }
    Ok(notes.join("; "))
}

fn negative_control() -> Outcome {
    let g = group(&[4, 4]);
    for a in enumerate_raw(&g, 72).map_err(err)? {
        let cert = is_schurian(&a).map_err(err)?;
        if !cert.schurian {
            let json = serde_json::to_string(&cert.to_json()).map_err(|e| e.to_string())?;
            let w = cert.witness.ok_or("non-schurian certificate without a witness")?;
            return Ok(format!("{:?}: class {:?} splits; {json}", a.classes(), a.class(w)));
        }
    }
    Err("every S-ring over C4 x C4 came out schurian".into())
}

fn three_group_suite() -> Outcome {
    let r = enumerate_srings(&group(&[3, 9])).map_err(err)?;
    let a = run_checks(&r, check_lemma_c3c3k, "lemma_c3c3k")?;
    let b = run_checks(&r, check_radical_persistence, "radical_persistence")?;
    Ok(format!("{a}, {b}"))
}

fn duality_and_translations() -> Result<usize, String> {
    let mut count = 0;
    for g in groups_up_to(16) {
        let ts: Vec<Perm> = (0..g.order()).map(|t| translation(&g, t)).collect();
        let all = enumerate_raw(&g, 72).map_err(err)?;
        let bad = all
            .par_iter()
            .map(|a| -> Result<bool, String> {
                let d = dual(a).map_err(err)?;
                let dd = dual(&d).map_err(err)?;
                let s = scheme_of(a);
                Ok(d.rank() != a.rank()
                    || canonical_form(&dd).map_err(err)? != canonical_form(a).map_err(err)?
                    || !ts.iter().all(|t| s.is_automorphism(t)))
            })
            .collect::<Result<Vec<bool>, String>>()?;
        ensure(!bad.contains(&true), || format!("{g}: duality or translation check fails"))?;
        count += all.len();
    }
    Ok(count)
}

fn holomorph_orbits() -> Result<(), String> {
    let groups: Vec<AbelianGroup> = groups_up_to(24).into_iter().filter(|g| g.order() >= 4).collect();
    // 20 fixed pairs spread over the list
    for i in 0..20usize {
        let g = &groups[(7 * i + 3) % groups.len()];
        let aut = automorphism_group(g).map_err(err)?;
        let elements = aut.elements().map_err(err)?;
        let gens = vec![
            elements[(131 * i + 17) % elements.len()].clone(),
            elements[(7919 * i + 5) % elements.len()].clone(),
        ];
        let k = PermGroup::new(g.order(), gens.clone()).map_err(err)?;
        let mut all = gens;
        all.extend(g.units().iter().map(|&u| translation(g, u)));
        let f = PermGroup::new(g.order(), all).map_err(err)?;
        ensure(orbit_sring(&f, g).map_err(err)? == cyclotomic(&k, g).map_err(err)?, || format!("pair {i} over {g}"))?;
    }
    Ok(())
}

fn dense_suite(inv: &[u32]) -> Result<usize, String> {
    let g = group(inv);
    let h = hall_complement(&g, 3);
    let p = sylow_subgroup(&g, 3);
    let mut parts = vec![(0, 0); g.order()];
    for &u in h.elements() {
        for &v in p.elements() {
            parts[g.add(u, v)] = (u, v);
        }
    }
    let units: Vec<i64> = (1..g.order() as i64).filter(|m| m % 2 != 0 && m % 3 != 0).collect();
    let mut checked = 0;
    for a in enumerate_raw(&g, 72).map_err(err)? {
        if !a.is_dense(&h, &p).map_err(err)? {
            continue;
        }
        for x in 0..a.rank() {
            if a.class(x).iter().any(|&z| h.contains(z) || p.contains(z)) {
                continue;
            }
            let d = decompose_basic_set(&a, &h, &p, x).map_err(err)?;
            let lambda = d.block_size();
            let uniform = d.blocks_h.iter().all(|b| b.len() == lambda);
            let paired = d.blocks_h.len() == d.blocks_p.len() && d.quotient_order().map_err(err)? == d.blocks_p.len();
            let mut orbits = orbits_of(g.order(), d.k_p0.generators(), &d.x_p);
            let mut blocks = d.blocks_p.clone();
            orbits.iter_mut().for_each(|o| o.sort_unstable());
            blocks.iter_mut().for_each(|b| b.sort_unstable());
            orbits.sort();
            blocks.sort();
            ensure(uniform && paired && orbits == blocks, || format!("{inv:?} {:?} class {x}", a.classes()))?;
            for y in 0..a.rank() {
                let inside = a.class(y).iter().all(|&z| d.x_h.contains(&parts[z].0) && parts[z].1 != 0);
                if inside {
                    let conj = units.iter().any(|&m| a.rational_conjugate(x, m).ok() == Some(y));
                    ensure(conj, || format!("{inv:?}: class {y} is no rational conjugate of {x}"))?;
                }
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn cyclic_sections() -> Result<usize, String> {
    let mut seen = 0;
    for n in [9u32, 27] {
        for a in enumerate_raw(&group(&[n]), 72).map_err(err)? {
            let sections = detect_generalized_wreath(&a).map_err(err)?;
            if sections.is_empty() {
                continue;
            }
            let subs = a.a_subgroups().map_err(err)?;
            let proper: Vec<&Subgroup> = subs.iter().filter(|s| !s.is_trivial() && !s.is_whole()).collect();
            let least = proper.iter().min_by_key(|s| s.order()).ok_or("no proper A-subgroup")?;
            let greatest = proper.iter().max_by_key(|s| s.order()).ok_or("no proper A-subgroup")?;
            ensure(sections.iter().any(|s| s.lower == **least), || format!("C{n}: {:?}", a.classes()))?;
            ensure(sections.iter().any(|s| s.upper == **greatest), || format!("C{n}: {:?}", a.classes()))?;
            seen += 1;
        }
    }
    Ok(seen)
}

fn property_suites() -> Outcome {
    let rings = duality_and_translations()?;
    holomorph_orbits()?;
    let dense = dense_suite(&[4, 2, 3])? + dense_suite(&[2, 2, 2, 3])?;
    let sections = cyclic_sections()?;
    Ok(format!(
        "duality/translations on {rings} rings, 20 holomorph pairs, {dense} dense classes, {sections} cyclic wreath rings"
    ))
}

fn permutations(n: usize) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..n {
            let mut q = p.clone();
            q.insert(slot, (n - 1) as u32);
            out.push(q);
        }
    }
    out
}

fn brute_force_automorphisms() -> Outcome {
    let mut checked = 0;
    for g in groups_up_to(5) {
        let all: Vec<Perm> = permutations(g.order())
            .into_iter()
            .map(|p| Perm::from_images(p).expect("bijection"))
            .collect();
        for a in enumerate_raw(&g, 72).map_err(err)? {
            let s = scheme_of(&a);
            let mut brute: Vec<Perm> = all.iter().filter(|f| s.is_automorphism(f)).cloned().collect();
            brute.sort();
            let found = scheme_automorphisms(&a).map_err(err)?;
            let mut elems = found.elements().map_err(err)?.to_vec();
            elems.sort();
            ensure(brute == elems, || format!("{g}: {:?}", a.classes()))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} rings"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, "order-8 classification", order_eight_classification),
        (2, "oracle equivalence", oracle_equivalence),
        (3, "schurity over C4xC6 and E8xC3", schurian_at_three),
        (4, "decomposition statements", decomposition_statements),
        (5, "non-schurian ring over C4xC4", negative_control),
        (6, "C3xC9 suite", three_group_suite),
        (7, "property suites", property_suites),
        (8, "brute-force automorphisms", brute_force_automorphisms),
    ];
    let filter: Option<u32> = std::env::args().nth(1).and_then(|a| a.parse().ok());
    let mut failed = 0;
    for (id, name, run) in criteria {
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id} {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id} {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
