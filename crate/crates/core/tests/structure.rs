//! Decomposition invariants on dense rings, subdirect stabilizers and
//! section properties over cyclic 3-groups.

use schurkit::aut::{automorphism_group, power_automorphism};
use schurkit::classify::{check_main15, wreath_bucket_subgroups};
use schurkit::constructions::detect::class_radicals;
use schurkit::constructions::{
    cyclotomic, decompose_basic_set, detect_generalized_wreath, subdirect_k,
    SubdirectSpec,
};
use schurkit::enumeration::enumerate_raw;
use schurkit::group::{hall_complement, make_group, sylow_subgroup, AbelianGroup, Subgroup};
use schurkit::perm::{orbits_of, Perm, PermGroup};
use schurkit::sring::SRing;

/// Multiplication by the generator of `GF(8) = GF(2)[x] / (x^3 + x + 1)`,
/// coordinates `(c0, c1, c2)` for `c0 + c1 x + c2 x^2`.
fn singer(e8: &AbelianGroup) -> Perm {
    perm_from_coords(e8, |c| [c[2], c[0] + c[2], c[1]])
}

/// Squaring in the same model.
fn frobenius(e8: &AbelianGroup) -> Perm {
    perm_from_coords(e8, |c| [c[0], c[2], c[1] + c[2]])
}

fn perm_from_coords(e8: &AbelianGroup, f: impl Fn([i64; 3]) -> [i64; 3]) -> Perm {
    let images = (0..8)
        .map(|i| {
            let c = e8.coords(i);
            e8.index_of(&f([c[0] as i64, c[1] as i64, c[2] as i64])) as u32
        })
        .collect();
    Perm::from_images(images).unwrap()
}

/// `(H-part, P-part)` of every element of `g = h x p`.
fn split(g: &AbelianGroup, h: &Subgroup, p: &Subgroup) -> Vec<(usize, usize)> {
    let mut out = vec![(0, 0); g.order()];
    for &u in h.elements() {
        for &v in p.elements() {
            out[g.add(u, v)] = (u, v);
        }
    }
    out
}

fn dense_suite(inv: &[u32]) -> usize {
    let g = make_group(inv).unwrap();
    let h = hall_complement(&g, 3);
    let p = sylow_subgroup(&g, 3);
    let parts = split(&g, &h, &p);
    let units: Vec<i64> = (1..g.order() as i64)
        .filter(|&m| schurkit::arith::gcd(m as u64, g.order() as u64) == 1)
        .collect();
    let mut checked = 0;
    for a in enumerate_raw(&g, 72).unwrap() {
        if !a.is_dense(&h, &p).unwrap() {
            continue;
        }
        for x in 0..a.rank() {
            if a.class(x).iter().any(|&z| h.contains(z) || p.contains(z)) {
                continue;
            }
            let d = decompose_basic_set(&a, &h, &p, x).unwrap();
            checked += 1;
            assert_eq!(d.blocks_h.len(), d.blocks_p.len());
            let lambda = d.block_size();
            assert!(d.blocks_h.iter().all(|b| b.len() == lambda));
            assert_eq!(d.x_h.len() % lambda, 0);
            assert_eq!(d.quotient_order().unwrap(), d.blocks_p.len());
            // the P-side blocks are the orbits of the stabilizer part
            let mut orbits = orbits_of(g.order(), d.k_p0.generators(), &d.x_p);
            let mut blocks = d.blocks_p.clone();
            orbits.iter_mut().for_each(|o| o.sort_unstable());
            blocks.iter_mut().for_each(|b| b.sort_unstable());
            orbits.sort();
            blocks.sort();
            assert_eq!(orbits, blocks);
            // classes inside X_H x P# are rational conjugates of X
            for y in 0..a.rank() {
                let inside = a
                    .class(y)
                    .iter()
                    .all(|&z| d.x_h.contains(&parts[z].0) && parts[z].1 != 0);
                if inside {
                    assert!(units.iter().any(|&m| a.rational_conjugate(x, m).unwrap() == y));
                }
            }
        }
    }
    checked
}

#[test]
fn dense_decompositions_over_c4xc2xc3() {
    assert!(dense_suite(&[4, 2, 3]) > 0);
}

#[test]
fn dense_decompositions_over_e8xc3() {
    assert!(dense_suite(&[2, 2, 2, 3]) > 0);
}

#[test]
fn dense_rings_with_trivial_two_part_are_tensor_or_cyclotomic() {
    let g = make_group(&[2, 2, 2, 3]).unwrap();
    let h = hall_complement(&g, 3);
    let p = sylow_subgroup(&g, 3);
    let mut seen = 0;
    for a in enumerate_raw(&g, 72).unwrap() {
        if !a.is_dense(&h, &p).unwrap() || !a.restrict(&h).unwrap().is_trivial_ring() {
            continue;
        }
        seen += 1;
        let v = check_main15(&a).unwrap();
        let d = v.disjunct.as_deref();
        assert!(matches!(d, Some("tensor") | Some("cyclotomic")), "{:?}: {d:?}", a.classes());
    }
    assert!(seen > 0);
}

#[test]
fn dense_rings_over_wreath_two_parts_keep_an_involution_in_radicals() {
    for inv in [[4u32, 2, 3].as_slice(), &[2, 2, 2, 3]] {
        let g = make_group(inv).unwrap();
        let h = hall_complement(&g, 3);
        let p = sylow_subgroup(&g, 3);
        let mut seen = 0;
        for a in enumerate_raw(&g, 72).unwrap() {
            if !a.is_dense(&h, &p).unwrap() {
                continue;
            }
            let (ah, embed) = a.restrict_with_embedding(&h).unwrap();
            let radicals = class_radicals(&a);
            for l_local in wreath_bucket_subgroups(&ah).unwrap() {
                seen += 1;
                let l_elems: Vec<usize> = l_local.elements().iter().map(|&x| embed[x]).collect();
                let l = Subgroup::from_elements(&g, &l_elems).unwrap();
                let lp = l.join(&p);
                let involutions: Vec<Subgroup> = l_elems
                    .iter()
                    .filter(|&&x| g.order_of_index(x) == 2)
                    .map(|&x| Subgroup::generated(&g, &[x]))
                    .collect();
                for (i, c) in a.classes().iter().enumerate() {
                    if lp.contains(c[0]) || h.contains(c[0]) {
                        continue;
                    }
                    assert!(
                        involutions.iter().any(|l0| l0.is_subgroup_of(&radicals[i])),
                        "{:?} class {i}",
                        a.classes()
                    );
                }
            }
        }
        assert!(seen > 0, "{g}");
    }
}

#[test]
fn subdirect_stabilizer_order_at_seven() {
    let e8 = make_group(&[2, 2, 2]).unwrap();
    let c7 = make_group(&[7]).unwrap();
    let k1 = PermGroup::new(8, vec![singer(&e8), frobenius(&e8)]).unwrap();
    let k1_0 = PermGroup::new(8, vec![singer(&e8)]).unwrap();
    let k2 = (*automorphism_group(&c7).unwrap()).clone();
    let k2_0 = PermGroup::new(7, vec![power_automorphism(&c7, -1).unwrap()]).unwrap();
    assert_eq!(k1.order().unwrap(), 21);
    let spec = SubdirectSpec::with_small_quotient(e8.clone(), c7.clone(), k1, k1_0, k2, k2_0).unwrap();
    let k = subdirect_k(&spec).unwrap();
    assert_eq!(k.order().unwrap(), 42);
    let g = e8.product(&c7);
    let a = cyclotomic(&k, &g).unwrap();
    let h = hall_complement(&g, 7);
    let p = sylow_subgroup(&g, 7);
    assert!(a.is_dense(&h, &p).unwrap());
    for x in 0..a.rank() {
        if a.class(x).iter().any(|&z| h.contains(z) || p.contains(z)) {
            continue;
        }
        let d = decompose_basic_set(&a, &h, &p, x).unwrap();
        assert_eq!(d.blocks_h.len(), d.blocks_p.len());
        assert_eq!(d.quotient_order().unwrap(), d.blocks_p.len());
    }
}

#[test]
fn singer_diagonal_over_e8xc29() {
    // the order-7 quotient needs 7 | p - 1; p = 29 is the least prime with
    // that property and an order-7 multiplier
    let e8 = make_group(&[2, 2, 2]).unwrap();
    let c29 = make_group(&[29]).unwrap();
    let s = singer(&e8);
    let m = power_automorphism(&c29, 16).unwrap();
    let k1 = PermGroup::new(8, vec![s.clone()]).unwrap();
    let k2 = PermGroup::new(29, vec![m.clone()]).unwrap();
    assert_eq!((k1.order().unwrap(), k2.order().unwrap()), (7, 7));
    let spec = SubdirectSpec::with_cyclic_quotient(
        e8.clone(),
        c29.clone(),
        k1,
        PermGroup::trivial(8),
        k2,
        PermGroup::trivial(29),
        &s,
        &m,
    )
    .unwrap();
    let k = subdirect_k(&spec).unwrap();
    assert_eq!(k.order().unwrap(), 7);
    let g = e8.product(&c29);
    let a = cyclotomic(&k, &g).unwrap();
    let h = hall_complement(&g, 29);
    let p = sylow_subgroup(&g, 29);
    assert!(a.is_dense(&h, &p).unwrap());
    let mut outside = 0;
    for x in 0..a.rank() {
        if a.class(x).iter().any(|&z| h.contains(z) || p.contains(z)) {
            continue;
        }
        outside += 1;
        let d = decompose_basic_set(&a, &h, &p, x).unwrap();
        assert_eq!(d.block_size(), 1);
        assert_eq!(d.blocks_p.len(), 7);
        assert_eq!(d.k_p.order().unwrap(), 7);
        assert_eq!(d.quotient_order().unwrap(), 7);
    }
    // 7 * 28 elements off H and P, in orbits of size 7
    assert_eq!(outside, 28);
}

fn chain_ends(a: &SRing) -> (Subgroup, Subgroup) {
    let subs = a.a_subgroups().unwrap();
    let proper: Vec<&Subgroup> = subs.iter().filter(|s| !s.is_trivial() && !s.is_whole()).collect();
    let least = proper.iter().min_by_key(|s| s.order()).map(|s| (*s).clone());
    let greatest = proper.iter().max_by_key(|s| s.order()).map(|s| (*s).clone());
    (least.unwrap(), greatest.unwrap())
}

#[test]
fn wreath_sections_over_cyclic_three_groups_reach_the_chain_ends() {
    for n in [9u32, 27] {
        let g = make_group(&[n]).unwrap();
        let mut seen = 0;
        for a in enumerate_raw(&g, 72).unwrap() {
            let sections = detect_generalized_wreath(&a).unwrap();
            if sections.is_empty() {
                continue;
            }
            seen += 1;
            // A-subgroups of a cyclic group form a chain
            let (least, greatest) = chain_ends(&a);
            assert!(sections.iter().any(|s| s.lower == least), "{:?}", a.classes());
            assert!(sections.iter().any(|s| s.upper == greatest), "{:?}", a.classes());
        }
        assert!(seen > 0);
    }
}
