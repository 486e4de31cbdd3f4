use crate::aut::is_automorphism;
use crate::error::{Error, Result};
use crate::group::{quotient_group, AbelianGroup, Section, Subgroup};
use crate::perm::{orbits_of, PermGroup};
use crate::sring::{canonicalize_classes, make_sring, SRing};

/// `T_G`: classes `{e}` and `G^#`.
pub fn trivial_sring(g: &AbelianGroup) -> SRing {
    let mut classes = vec![vec![0]];
    if g.order() > 1 {
        classes.push((1..g.order()).collect());
    }
    SRing::from_valid(g.clone(), classes)
}

/// `ZG`: all classes singletons.
pub fn group_ring(g: &AbelianGroup) -> SRing {
    SRing::from_valid(g.clone(), (0..g.order()).map(|x| vec![x]).collect())
}

/// `cyc(K, G)`: orbits of a group of automorphisms.
pub fn cyclotomic(k: &PermGroup, g: &AbelianGroup) -> Result<SRing> {
    if k.degree() != g.order() {
        return Err(Error::NotAnAutomorphism);
    }
    if k.generators().iter().any(|s| !is_automorphism(g, s)) {
        return Err(Error::NotAnAutomorphism);
    }
    let domain: Vec<usize> = (0..g.order()).collect();
    let orbits = orbits_of(g.order(), k.generators(), &domain);
    Ok(SRing::from_valid(g.clone(), orbits))
}

/// `A (x) B` over `G1 x G2`; `(g, h)` has index `g * |G2| + h`.
pub fn tensor(a: &SRing, b: &SRing) -> SRing {
    let g = a.group().product(b.group());
    let m = b.group().order();
    let mut classes = Vec::with_capacity(a.rank() * b.rank());
    for x in a.classes() {
        for y in b.classes() {
            let mut c: Vec<usize> = x
                .iter()
                .flat_map(|&u| y.iter().map(move |&v| u * m + v))
                .collect();
            c.sort_unstable();
            classes.push(c);
        }
    }
    SRing::from_valid(g, canonicalize_classes(classes))
}

/// Checks that `ring` lives on the standalone group of subgroup `h`.
fn embedding_for(ring: &SRing, h: &Subgroup) -> Result<Vec<usize>> {
    let (ag, embed) = h.abstract_group();
    if ring.group() != &ag {
        return Err(Error::WrongShape(format!(
            "ring over {} does not match subgroup of type {}",
            ring.group(),
            ag
        )));
    }
    Ok(embed)
}

/// `A_U` on `U` and `A_{G/L}` on `G/L` glued along `S = U/L`. The ring on
/// `U` lives on `U.abstract_group()`, the quotient ring on
/// `quotient_group(G, L).group()`.
pub fn generalized_wreath(
    a_u: &SRing,
    a_quot: &SRing,
    g: &AbelianGroup,
    section: &Section,
) -> Result<SRing> {
    let embed = embedding_for(a_u, &section.upper)?;
    let q = quotient_group(g, &section.lower);
    if a_quot.group() != q.group() {
        return Err(Error::WrongShape(format!(
            "quotient ring over {} does not match G/L of type {}",
            a_quot.group(),
            q.group()
        )));
    }
    let lower_classes: Vec<Vec<usize>> = a_u
        .classes()
        .iter()
        .map(|c| c.iter().map(|&x| embed[x]).collect())
        .collect();
    gluing(g, &section.upper, &q, lower_classes, a_quot.classes())
}

/// Shared core: `lower` partitions `U` (parent indices), `upper` partitions
/// `G/L` (quotient indices).
pub(crate) fn gluing(
    g: &AbelianGroup,
    u: &Subgroup,
    q: &crate::group::Quotient,
    lower: Vec<Vec<usize>>,
    upper: &[Vec<usize>],
) -> Result<SRing> {
    let u_bar = q.push_subgroup(u);
    let mut pushed: Vec<Vec<usize>> = lower.iter().map(|c| q.project_set(c)).collect();
    pushed.sort();
    pushed.dedup();
    let mut inside: Vec<Vec<usize>> = upper
        .iter()
        .filter(|c| u_bar.contains(c[0]))
        .cloned()
        .collect();
    inside.sort();
    if pushed != inside {
        return Err(Error::IncompatibleSection(format!(
            "ring on U/L from below {pushed:?} differs from ring on U/L from above {inside:?}"
        )));
    }
    let mut classes = lower;
    for c in upper {
        if c.iter().any(|&x| !u_bar.contains(x)) {
            classes.push(q.preimage(c));
        }
    }
    make_sring(g, classes).map_err(|e| Error::ResultFailsAxioms(e.to_string()))
}

/// `A wr B` with `A` on `L` and `B` on `G/L`.
pub fn wreath(a: &SRing, b: &SRing, g: &AbelianGroup, l: &Subgroup) -> Result<SRing> {
    let s = Section::new(l.clone(), l.clone())?;
    generalized_wreath(a, b, g, &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aut::automorphism_group;
    use crate::group::{make_group, subgroup_generated};
    use crate::sring::radical_of_set;

    #[test]
    fn trivial_examples() {
        let c2 = make_group(&[2]).unwrap();
        assert_eq!(trivial_sring(&c2), group_ring(&c2));
        assert_eq!(trivial_sring(&make_group(&[4]).unwrap()).classes(), &[vec![0], vec![1, 2, 3]]);
        assert_eq!(trivial_sring(&AbelianGroup::trivial()).rank(), 1);
    }

    #[test]
    fn cyclotomic_examples() {
        let g = make_group(&[4, 2]).unwrap();
        assert_eq!(cyclotomic(&PermGroup::trivial(8), &g).unwrap(), group_ring(&g));
        let full = cyclotomic(&automorphism_group(&g).unwrap(), &g).unwrap();
        // {e}, {a^2}, {a, a^3, ab, a^3 b}, {b, a^2 b}
        assert_eq!(full.rank(), 4);
        let bad = crate::perm::Perm::from_images(vec![0, 2, 1, 3, 4, 5, 6, 7]).unwrap();
        let k = PermGroup::new(8, vec![bad]).unwrap();
        assert_eq!(cyclotomic(&k, &g), Err(Error::NotAnAutomorphism));
    }

    #[test]
    fn tensor_examples() {
        let c2 = make_group(&[2]).unwrap();
        let c3 = make_group(&[3]).unwrap();
        let t = tensor(&trivial_sring(&c2), &trivial_sring(&c2));
        assert_eq!(t.rank(), 4);
        assert_eq!(t.group().factors(), &[2, 2]);
        let z = tensor(&group_ring(&c2), &group_ring(&c3));
        assert_eq!(z, group_ring(&make_group(&[2, 3]).unwrap()));
        let c4 = make_group(&[4]).unwrap();
        let w = tensor(&trivial_sring(&c4), &group_ring(&c3));
        assert_eq!(w.rank(), 6);
        make_sring(w.group(), w.classes().to_vec()).unwrap();
    }

    #[test]
    fn wreath_examples() {
        let c4 = make_group(&[4]).unwrap();
        let l = subgroup_generated(&c4, &[2]);
        let (lg, _) = l.abstract_group();
        let q = quotient_group(&c4, &l);
        let w = wreath(&group_ring(&lg), &group_ring(q.group()), &c4, &l).unwrap();
        assert_eq!(w.classes(), &[vec![0], vec![1, 3], vec![2]]);
        for c in w.classes() {
            if !l.contains(c[0]) {
                assert!(l.is_subgroup_of(&radical_of_set(&c4, c).unwrap()));
            }
        }
        let triv = Subgroup::trivial(&c4);
        let t = trivial_sring(&c4);
        assert_eq!(wreath(&group_ring(&AbelianGroup::trivial()), &t, &c4, &triv).unwrap(), t);
    }

    #[test]
    fn generalized_wreath_collapses() {
        let g = make_group(&[4, 2]).unwrap();
        let zg = group_ring(&g);
        let s = Section::new(Subgroup::whole(&g), Subgroup::trivial(&g)).unwrap();
        assert_eq!(generalized_wreath(&zg, &zg, &g, &s).unwrap(), zg);
        let c4 = make_group(&[4]).unwrap();
        let l = subgroup_generated(&c4, &[2]);
        let s = Section::new(l.clone(), l.clone()).unwrap();
        let (lg, _) = l.abstract_group();
        let q = quotient_group(&c4, &l);
        let w = generalized_wreath(&group_ring(&lg), &group_ring(q.group()), &c4, &s).unwrap();
        assert_eq!(w.rank(), 3);
    }

    #[test]
    fn incompatible_section_is_rejected() {
        let g = make_group(&[4, 2]).unwrap();
        let a = subgroup_generated(&g, &[g.index_of(&[1, 0])]);
        let a0 = subgroup_generated(&g, &[g.index_of(&[2, 0])]);
        let s = Section::new(a.clone(), a0.clone()).unwrap();
        let (ag, _) = a.abstract_group();
        let q = quotient_group(&g, &a0);
        // the image of T on <a> in <a>/A0 is not a partition
        let r = generalized_wreath(&trivial_sring(&ag), &trivial_sring(q.group()), &g, &s);
        assert!(matches!(r, Err(Error::IncompatibleSection(_))));
    }
}
