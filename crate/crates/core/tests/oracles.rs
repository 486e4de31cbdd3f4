//! Enumeration and schurity checked against slow, independent oracles.

use schurkit::enumeration::{
    canonical_form, enumerate_raw, enumerate_srings, inverse_closed_partitions, meet,
    naive_enumerate, naive_is_sring,
};
use schurkit::group::{abelian_groups_of_order, make_group, AbelianGroup};
use schurkit::schurity::{is_schurian, scheme_of, ColorScheme};
use schurkit::sring::make_sring;

fn small_groups() -> Vec<AbelianGroup> {
    let mut out: Vec<AbelianGroup> = (2..=8).flat_map(|n| abelian_groups_of_order(n).unwrap()).collect();
    // same group presented with the factors in the other order
    out.push(make_group(&[2, 4]).unwrap());
    out
}

#[test]
fn enumeration_matches_naive_search() {
    for g in small_groups() {
        let fast = enumerate_srings(&g).unwrap();
        let slow = naive_enumerate(&g).unwrap();
        assert_eq!(fast.srings, slow, "{g}");
        let mut reps: Vec<_> = slow.iter().map(|a| canonical_form(a).unwrap()).collect();
        reps.sort();
        reps.dedup();
        assert_eq!(fast.class_reps, reps, "{g}");
    }
}

#[test]
fn validation_matches_indicator_products() {
    for g in small_groups() {
        for classes in inverse_closed_partitions(&g).unwrap() {
            let fast = make_sring(&g, classes.clone()).is_ok();
            assert_eq!(fast, naive_is_sring(&g, &classes), "{g}: {classes:?}");
        }
    }
}

#[test]
fn meets_stay_in_the_family() {
    for inv in [[4u32, 2].as_slice(), &[2, 2, 2], &[3, 3], &[12]] {
        let g = make_group(inv).unwrap();
        let all = enumerate_raw(&g, 72).unwrap();
        for a in &all {
            for b in all.iter().step_by(3) {
                let m = meet(a, b).unwrap();
                assert!(all.binary_search(&m).is_ok(), "{g}");
            }
        }
    }
}

#[test]
fn counts_are_stable_across_thread_counts() {
    let g = make_group(&[4, 4]).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| enumerate_raw(&g, 72).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn measured_counts() {
    // regression values; orders up to 11 also agree with the naive search
    for (inv, count) in [
        (vec![16u32], 37),
        (vec![4, 4], 537),
        (vec![2, 8], 163),
        (vec![9], 7),
        (vec![3, 3], 40),
        (vec![10], 10),
        (vec![11], 4),
        (vec![4, 2], 28),
        (vec![2, 2, 2], 100),
    ] {
        let g = make_group(&inv).unwrap();
        assert_eq!(enumerate_raw(&g, 72).unwrap().len(), count, "{g}");
    }
}

/// Whether some scheme automorphism fixing 0 maps `p` to `t`: plain
/// backtracking over images of `0, 1, 2, ...`.
fn extends(s: &ColorScheme, images: &mut Vec<usize>, used: &mut [bool], p: usize, t: usize) -> bool {
    let n = s.points();
    let k = images.len();
    if k == n {
        return true;
    }
    let targets: Vec<usize> = if k == p { vec![t] } else { (0..n).collect() };
    for y in targets {
        if used[y] || !(0..k).all(|x| s.color(x, k) == s.color(images[x], y)) {
            continue;
        }
        used[y] = true;
        images.push(y);
        if extends(s, images, used, p, t) {
            return true;
        }
        images.pop();
        used[y] = false;
    }
    false
}

#[test]
fn stabilizer_orbits_match_extension_search_over_c4xc4() {
    let g = make_group(&[4, 4]).unwrap();
    let mut non_schurian = 0;
    for a in enumerate_raw(&g, 72).unwrap() {
        let s = scheme_of(&a);
        let cert = is_schurian(&a).unwrap();
        non_schurian += usize::from(!cert.schurian);
        for orbit in &cert.stabilizer_orbits {
            for &t in a.class(a.class_of(orbit[0])) {
                let mut used = vec![false; g.order()];
                used[0] = true;
                let reachable = extends(&s, &mut vec![0], &mut used, orbit[0], t);
                assert_eq!(reachable, orbit.contains(&t), "{:?}", a.classes());
            }
        }
    }
    assert_eq!(non_schurian, 84);
}
