//! Detectors for cyclotomic, tensor and generalized-wreath structure.

use serde::{Deserialize, Serialize};

use crate::aut::automorphism_group;
use crate::error::Result;
use crate::group::{Section, Subgroup};
use crate::perm::{orbits_of, PermGroup};
use crate::sring::{radical_of_set, SRing};

/// `K*`, the setwise stabilizer of all classes in `Aut(G)`, when its orbits
/// are exactly the classes.
pub fn detect_cyclotomic(a: &SRing) -> Result<Option<PermGroup>> {
    let g = a.group();
    let aut = automorphism_group(g)?;
    let cls = a.class_map();
    let kept: Vec<_> = aut
        .elements()?
        .iter()
        .filter(|s| (0..g.order()).all(|x| cls[s.apply(x)] == cls[x]))
        .cloned()
        .collect();
    let domain: Vec<usize> = (0..g.order()).collect();
    let orbits = orbits_of(g.order(), &kept, &domain);
    if orbits.as_slice() == a.classes() {
        Ok(Some(PermGroup::from_elements(g.order(), kept)))
    } else {
        Ok(None)
    }
}

/// Whether the classes of `a` inside `u = g1 x g2` are exactly the products
/// of a class inside `g1` and a class inside `g2`.
pub fn is_internal_tensor(a: &SRing, u: &Subgroup, g1: &Subgroup, g2: &Subgroup) -> bool {
    let g = a.group();
    if g1.order() * g2.order() != u.order()
        || !g1.is_subgroup_of(u)
        || !g2.is_subgroup_of(u)
        || g1.intersection(g2).order() != 1
        || !a.is_asubgroup(g1)
        || !a.is_asubgroup(g2)
        || !a.is_asubgroup(u)
    {
        return false;
    }
    let n = g.order();
    let mut left = vec![usize::MAX; n];
    let mut right = vec![usize::MAX; n];
    for &x in g1.elements() {
        for &y in g2.elements() {
            let z = g.add(x, y);
            left[z] = x;
            right[z] = y;
        }
    }
    let count = |h: &Subgroup| a.classes().iter().filter(|c| h.contains(c[0])).count();
    if count(u) != count(g1) * count(g2) {
        return false;
    }
    for c in a.classes().iter().filter(|c| u.contains(c[0])) {
        let mut l: Vec<usize> = c.iter().map(|&z| left[z]).collect();
        let mut r: Vec<usize> = c.iter().map(|&z| right[z]).collect();
        l.sort_unstable();
        l.dedup();
        r.sort_unstable();
        r.dedup();
        if l.len() * r.len() != c.len()
            || a.class(a.class_of(l[0])) != l.as_slice()
            || a.class(a.class_of(r[0])) != r.as_slice()
        {
            return false;
        }
    }
    true
}

/// A pair of nontrivial proper A-subgroups `G1, G2` with `A = A_G1 (x) A_G2`.
pub fn detect_tensor(a: &SRing) -> Result<Option<(Subgroup, Subgroup)>> {
    let subs = a.a_subgroups()?;
    let whole = Subgroup::whole(a.group());
    for (i, g1) in subs.iter().enumerate() {
        if g1.is_trivial() || g1.is_whole() {
            continue;
        }
        for g2 in &subs[i + 1..] {
            if g2.is_whole() || g1.order() * g2.order() != whole.order() {
                continue;
            }
            if is_internal_tensor(a, &whole, g1, g2) {
                return Ok(Some((g1.clone(), g2.clone())));
            }
        }
    }
    Ok(None)
}

/// Radicals of all classes, by class index.
pub fn class_radicals(a: &SRing) -> Vec<Subgroup> {
    a.classes()
        .iter()
        .map(|c| radical_of_set(a.group(), c).expect("classes are nonempty"))
        .collect()
}

/// Whether `a` is a `U/L`-wreath product (trivial sections included).
pub fn is_section_wreath(a: &SRing, s: &Section, radicals: &[Subgroup]) -> bool {
    a.is_asubgroup(&s.upper)
        && a.is_asubgroup(&s.lower)
        && a
            .classes()
            .iter()
            .zip(radicals)
            .all(|(c, r)| s.upper.contains(c[0]) || s.lower.is_subgroup_of(r))
}

/// All sections `U/L` of A-subgroups with `{e} < L <= U < G` such that
/// `L <= rad(X)` for every class `X` outside `U`, in sorted order.
pub fn detect_generalized_wreath(a: &SRing) -> Result<Vec<Section>> {
    let subs = a.a_subgroups()?;
    let radicals = class_radicals(a);
    let mut out = Vec::new();
    for l in subs.iter().filter(|l| !l.is_trivial()) {
        for u in subs.iter().filter(|u| !u.is_whole() && l.is_subgroup_of(u)) {
            let s = Section {
                upper: u.clone(),
                lower: l.clone(),
            };
            if is_section_wreath(a, &s, &radicals) {
                out.push(s);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// An A-subgroup `M` with `U = L x M` and `A_U = A_L (x) A_M`.
pub fn detect_otimes_complemented(a: &SRing, l: &Subgroup, u: &Subgroup) -> Result<Option<Subgroup>> {
    if !l.is_subgroup_of(u) || !a.is_asubgroup(l) || !a.is_asubgroup(u) {
        return Ok(None);
    }
    for m in a.a_subgroups()? {
        if m.is_subgroup_of(u) && l.order() * m.order() == u.order() && is_internal_tensor(a, u, l, m) {
            return Ok(Some(m.clone()));
        }
    }
    Ok(None)
}

/// Kind-tagged structural witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decomposition {
    Cyclotomic { generators: Vec<Vec<u32>>, order: usize },
    Tensor { left: Vec<usize>, right: Vec<usize> },
    Wreath { subgroup: Vec<usize> },
    GeneralizedWreath { upper: Vec<usize>, lower: Vec<usize> },
    OtimesComplemented { factor: Vec<usize>, complement: Vec<usize>, within: Vec<usize> },
    /// `A_{U/L}` is tensor-complemented in `A_{G/L}`; subgroups given by their preimages in `G`.
    QuotientOtimesComplemented { kernel: Vec<usize>, factor: Vec<usize>, complement: Vec<usize> },
}

impl Decomposition {
    pub fn cyclotomic(k: &PermGroup) -> Result<Decomposition> {
        Ok(Decomposition::Cyclotomic {
            generators: k.generators().iter().map(|p| p.images().to_vec()).collect(),
            order: k.order()?,
        })
    }

    pub fn section(s: &Section) -> Decomposition {
        if s.upper == s.lower {
            Decomposition::Wreath {
                subgroup: s.lower.elements().to_vec(),
            }
        } else {
            Decomposition::GeneralizedWreath {
                upper: s.upper.elements().to_vec(),
                lower: s.lower.elements().to_vec(),
            }
        }
    }

    /// Re-checks the witness against `a`.
    pub fn revalidate(&self, a: &SRing) -> Result<bool> {
        let g = a.group();
        let sub = |e: &[usize]| Subgroup::from_elements(g, e);
        Ok(match self {
            Decomposition::Cyclotomic { generators, .. } => {
                let gens: Vec<_> = generators
                    .iter()
                    .map(|p| crate::perm::Perm::from_images(p.clone()))
                    .collect::<Result<_>>()?;
                let k = PermGroup::new(g.order(), gens)?;
                crate::constructions::cyclotomic(&k, g)? == *a
            }
            Decomposition::Tensor { left, right } => {
                is_internal_tensor(a, &Subgroup::whole(g), &sub(left)?, &sub(right)?)
            }
            Decomposition::Wreath { subgroup } => {
                let l = sub(subgroup)?;
                let s = Section { upper: l.clone(), lower: l };
                is_section_wreath(a, &s, &class_radicals(a))
            }
            Decomposition::GeneralizedWreath { upper, lower } => {
                let s = Section::new(sub(upper)?, sub(lower)?)?;
                is_section_wreath(a, &s, &class_radicals(a))
            }
            Decomposition::OtimesComplemented { factor, complement, within } => {
                is_internal_tensor(a, &sub(within)?, &sub(factor)?, &sub(complement)?)
            }
            Decomposition::QuotientOtimesComplemented { kernel, factor, complement } => {
                let (aq, q) = a.quotient_with_map(&sub(kernel)?)?;
                let f = q.push_subgroup(&sub(factor)?);
                let c = q.push_subgroup(&sub(complement)?);
                is_internal_tensor(&aq, &Subgroup::whole(aq.group()), &f, &c)
            }
        })
    }
}

/// Every structural witness found for `a`.
pub fn all_decompositions(a: &SRing) -> Result<Vec<Decomposition>> {
    let mut out = Vec::new();
    if let Some(k) = detect_cyclotomic(a)? {
        out.push(Decomposition::cyclotomic(&k)?);
    }
    if let Some((l, r)) = detect_tensor(a)? {
        out.push(Decomposition::Tensor {
            left: l.elements().to_vec(),
            right: r.elements().to_vec(),
        });
    }
    for s in detect_generalized_wreath(a)? {
        out.push(Decomposition::section(&s));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{group_ring, tensor, trivial_sring, wreath};
    use crate::group::{make_group, quotient_group, subgroup_generated};

    #[test]
    fn cyclotomic_detection() {
        let g = make_group(&[4, 2]).unwrap();
        let k = detect_cyclotomic(&group_ring(&g)).unwrap().unwrap();
        assert_eq!(k.order().unwrap(), 1);
        assert!(detect_cyclotomic(&trivial_sring(&g)).unwrap().is_none());
        let e8 = make_group(&[2, 2, 2]).unwrap();
        assert!(detect_cyclotomic(&trivial_sring(&e8)).unwrap().is_some());
    }

    #[test]
    fn tensor_detection() {
        let c2 = make_group(&[2]).unwrap();
        let c3 = make_group(&[3]).unwrap();
        let t = tensor(&trivial_sring(&c2), &trivial_sring(&c3));
        let (a, b) = detect_tensor(&t).unwrap().unwrap();
        let mut orders = [a.order(), b.order()];
        orders.sort();
        assert_eq!(orders, [2, 3]);
        let c6 = make_group(&[6]).unwrap();
        assert!(detect_tensor(&group_ring(&c6)).unwrap().is_some());
        assert!(detect_tensor(&trivial_sring(&c6)).unwrap().is_none());
    }

    #[test]
    fn wreath_detection() {
        let c4 = make_group(&[4]).unwrap();
        let l = subgroup_generated(&c4, &[2]);
        let q = quotient_group(&c4, &l);
        let w = wreath(&group_ring(&l.abstract_group().0), &group_ring(q.group()), &c4, &l).unwrap();
        let secs = detect_generalized_wreath(&w).unwrap();
        assert!(secs.contains(&Section { upper: l.clone(), lower: l }));
        assert!(detect_generalized_wreath(&group_ring(&c4)).unwrap().is_empty());
        for d in all_decompositions(&w).unwrap() {
            assert!(d.revalidate(&w).unwrap());
        }
    }

    #[test]
    fn otimes_complement_examples() {
        let c2 = make_group(&[2]).unwrap();
        let c3 = make_group(&[3]).unwrap();
        let t = tensor(&trivial_sring(&c2), &group_ring(&c3));
        let g = t.group().clone();
        let whole = Subgroup::whole(&g);
        let left = crate::group::sylow_subgroup(&g, 2);
        let right = crate::group::sylow_subgroup(&g, 3);
        assert_eq!(detect_otimes_complemented(&t, &left, &whole).unwrap(), Some(right));
        let triv = Subgroup::trivial(&g);
        assert_eq!(detect_otimes_complemented(&t, &triv, &whole).unwrap(), Some(whole.clone()));
        let e8 = make_group(&[2, 2, 2]).unwrap();
        let tr = trivial_sring(&e8);
        let l2 = subgroup_generated(&e8, &[1]);
        assert_eq!(detect_otimes_complemented(&tr, &l2, &Subgroup::whole(&e8)).unwrap(), None);
    }
}
