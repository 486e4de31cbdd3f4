//! The S-ring data type over a finite abelian group.
//!
//! Classes are kept in canonical order: each class sorted, classes sorted by
//! minimum element, so class 0 is always `{e}`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::group::{all_subgroups, quotient_group, AbelianGroup, Quotient, Subgroup};
use crate::perm::Perm;

type ConstantCache = HashMap<(u32, u32), Arc<Vec<u32>>>;

#[derive(Clone)]
pub struct SRing(Arc<Inner>);

struct Inner {
    group: AbelianGroup,
    classes: Vec<Vec<usize>>,
    class_of: Vec<u32>,
    sc_cache: Mutex<ConstantCache>,
    a_subgroups: OnceLock<Vec<Subgroup>>,
}

impl PartialEq for SRing {
    fn eq(&self, other: &Self) -> bool {
        self.0.group == other.0.group && self.0.classes == other.0.classes
    }
}
impl Eq for SRing {}

impl std::hash::Hash for SRing {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.group.hash(state);
        self.0.classes.hash(state);
    }
}

impl PartialOrd for SRing {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for SRing {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.0.group.factors(), &self.0.classes).cmp(&(other.0.group.factors(), &other.0.classes))
    }
}

impl fmt::Debug for SRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SRing({}, {:?})", self.0.group, self.0.classes)
    }
}

/// A basic set of an S-ring.
#[derive(Clone, Copy, Debug)]
pub struct BasicSet<'a> {
    pub sring: &'a SRing,
    pub index: usize,
}

impl<'a> BasicSet<'a> {
    pub fn elements(&self) -> &'a [usize] {
        &self.sring.0.classes[self.index]
    }
}

/// Sorts each class and the class list into canonical order.
pub fn canonicalize_classes(mut classes: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for c in classes.iter_mut() {
        c.sort_unstable();
    }
    classes.retain(|c| !c.is_empty());
    classes.sort();
    classes
}

pub fn is_canonical(classes: &[Vec<usize>]) -> bool {
    classes.iter().all(|c| c.windows(2).all(|w| w[0] < w[1]))
        && classes.windows(2).all(|w| w[0] < w[1])
}

/// Validates and builds an S-ring; classes are canonicalized first.
pub fn make_sring(group: &AbelianGroup, classes: Vec<Vec<usize>>) -> Result<SRing> {
    let classes = canonicalize_classes(classes);
    let n = group.order();
    let mut class_of = vec![u32::MAX; n];
    for (i, c) in classes.iter().enumerate() {
        for &x in c {
            if x >= n {
                return Err(Error::NotAPartition(format!("element {x} out of range")));
            }
            if class_of[x] != u32::MAX {
                return Err(Error::NotAPartition(format!("element {x} lies in two classes")));
            }
            class_of[x] = i as u32;
        }
    }
    if let Some(x) = class_of.iter().position(|&c| c == u32::MAX) {
        return Err(Error::NotAPartition(format!("element {x} is not covered")));
    }
    if classes[0] != [0] {
        return Err(Error::IdentityNotSingleton);
    }
    let ring = SRing::from_parts(group.clone(), classes, class_of);
    ring.check_inverse_closed()?;
    ring.check_module_closure()?;
    Ok(ring)
}

impl SRing {
    fn from_parts(group: AbelianGroup, classes: Vec<Vec<usize>>, class_of: Vec<u32>) -> SRing {
        SRing(Arc::new(Inner {
            group,
            classes,
            class_of,
            sc_cache: Mutex::new(HashMap::new()),
            a_subgroups: OnceLock::new(),
        }))
    }

    /// Builds from canonical classes already known to satisfy the axioms.
    pub(crate) fn from_valid(group: AbelianGroup, classes: Vec<Vec<usize>>) -> SRing {
        debug_assert!(is_canonical(&classes));
        let mut class_of = vec![0u32; group.order()];
        for (i, c) in classes.iter().enumerate() {
            for &x in c {
                class_of[x] = i as u32;
            }
        }
        SRing::from_parts(group, classes, class_of)
    }

    fn check_inverse_closed(&self) -> Result<()> {
        let g = &self.0.group;
        for (i, c) in self.0.classes.iter().enumerate() {
            let target = self.0.class_of[g.neg(c[0])];
            let mut inv: Vec<usize> = c.iter().map(|&x| g.neg(x)).collect();
            inv.sort_unstable();
            if inv != self.0.classes[target as usize] {
                return Err(Error::NotInverseClosed(i));
            }
        }
        Ok(())
    }

    fn check_module_closure(&self) -> Result<()> {
        let r = self.rank();
        for i in 0..r {
            for j in i..r {
                let counts = self.product_counts(i, j);
                for c in &self.0.classes {
                    let z = c[0];
                    if let Some(&z2) = c.iter().find(|&&w| counts[w] != counts[z]) {
                        return Err(Error::ModuleClosure { x: i, y: j, z, z2 });
                    }
                }
            }
        }
        Ok(())
    }

    /// Multiplicity of every group element in the product `X_i X_j`.
    pub fn product_counts(&self, i: usize, j: usize) -> Vec<u32> {
        let g = &self.0.group;
        let mut counts = vec![0u32; g.order()];
        for &x in &self.0.classes[i] {
            for &y in &self.0.classes[j] {
                counts[g.add(x, y)] += 1;
            }
        }
        counts
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.0.group
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.0.classes
    }

    pub fn class(&self, i: usize) -> &[usize] {
        &self.0.classes[i]
    }

    pub fn basic_set(&self, i: usize) -> BasicSet<'_> {
        BasicSet { sring: self, index: i }
    }

    pub fn rank(&self) -> usize {
        self.0.classes.len()
    }

    #[inline]
    pub fn class_of(&self, x: usize) -> usize {
        self.0.class_of[x] as usize
    }

    pub fn class_map(&self) -> &[u32] {
        &self.0.class_of
    }

    /// `T_G`: at most two classes.
    pub fn is_trivial_ring(&self) -> bool {
        self.rank() <= 2
    }

    /// `ZG`: every class a singleton.
    pub fn is_group_ring(&self) -> bool {
        self.rank() == self.0.group.order()
    }

    /// Structure constants `c_{ij}^k` for all `k`, cached per `(i, j)`.
    pub fn structure_row(&self, i: usize, j: usize) -> Arc<Vec<u32>> {
        let key = if i <= j { (i as u32, j as u32) } else { (j as u32, i as u32) };
        if let Some(hit) = self.0.sc_cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let counts = self.product_counts(key.0 as usize, key.1 as usize);
        let row: Arc<Vec<u32>> = Arc::new(self.0.classes.iter().map(|c| counts[c[0]]).collect());
        self.0.sc_cache.lock().unwrap().insert(key, row.clone());
        row
    }

    /// `|{(x, y) in X_i x X_j : xy = z}|` for any `z` in `X_k`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> u32 {
        self.structure_row(i, j)[k]
    }

    /// Whether `set` is a union of classes.
    pub fn is_union_of_classes(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.0.group.order()];
        for &x in set {
            member[x] = true;
        }
        set.iter()
            .all(|&x| self.0.classes[self.class_of(x)].iter().all(|&y| member[y]))
    }

    pub fn is_asubgroup(&self, h: &Subgroup) -> bool {
        h.elements()
            .iter()
            .all(|&x| self.0.classes[self.class_of(x)].iter().all(|&y| h.contains(y)))
    }

    /// All A-subgroups, sorted by (order, element set).
    pub fn a_subgroups(&self) -> Result<&[Subgroup]> {
        if let Some(v) = self.0.a_subgroups.get() {
            return Ok(v);
        }
        let subs = all_subgroups(&self.0.group)?;
        let v: Vec<Subgroup> = subs.iter().filter(|h| self.is_asubgroup(h)).cloned().collect();
        Ok(self.0.a_subgroups.get_or_init(|| v))
    }

    /// Least A-subgroup containing `set`.
    pub fn least_asubgroup_containing(&self, set: &[usize]) -> Subgroup {
        let g = &self.0.group;
        let mut h = Subgroup::generated(g, set);
        loop {
            let mut gens: Vec<usize> = h.generators().to_vec();
            let mut grew = false;
            for &x in h.elements() {
                for &y in &self.0.classes[self.class_of(x)] {
                    if !h.contains(y) {
                        gens.push(y);
                        grew = true;
                    }
                }
            }
            if !grew {
                return h;
            }
            h = Subgroup::generated(g, &gens);
        }
    }

    /// A-subgroups inside `h` not properly contained in another such.
    pub fn maximal_asubgroups_within(&self, h: &Subgroup) -> Result<Vec<Subgroup>> {
        let inside: Vec<&Subgroup> = self
            .a_subgroups()?
            .iter()
            .filter(|k| k.is_subgroup_of(h))
            .collect();
        Ok(inside
            .iter()
            .filter(|k| {
                !inside
                    .iter()
                    .any(|m| m.order() > k.order() && k.is_subgroup_of(m))
            })
            .map(|k| (*k).clone())
            .collect())
    }

    /// Class index of `X^{(m)}`.
    pub fn rational_conjugate(&self, i: usize, m: i64) -> Result<usize> {
        let g = &self.0.group;
        if g.order() > 1 && gcd(m.unsigned_abs(), g.order() as u64) != 1 {
            return Err(Error::InvalidMultiplier(m));
        }
        let c = &self.0.classes[i];
        let target = self.class_of(g.scale(c[0], m));
        let mut img: Vec<usize> = c.iter().map(|&x| g.scale(x, m)).collect();
        img.sort_unstable();
        if img != self.0.classes[target] {
            return Err(Error::Internal(format!(
                "rational conjugate of class {i} by {m} is not a class"
            )));
        }
        Ok(target)
    }

    /// `A_U` over `U` (as a standalone group; `U = G` keeps the indexing).
    pub fn restrict(&self, u: &Subgroup) -> Result<SRing> {
        Ok(self.restrict_with_embedding(u)?.0)
    }

    pub fn restrict_with_embedding(&self, u: &Subgroup) -> Result<(SRing, Vec<usize>)> {
        if !self.is_asubgroup(u) {
            return Err(Error::NotAnASubgroup(format!("{u:?}")));
        }
        let (ug, embed) = u.abstract_group();
        if u.is_whole() {
            return Ok((self.clone(), embed));
        }
        let mut back = HashMap::new();
        for (i, &x) in embed.iter().enumerate() {
            back.insert(x, i);
        }
        let classes: Vec<Vec<usize>> = self
            .0
            .classes
            .iter()
            .filter(|c| u.contains(c[0]))
            .map(|c| c.iter().map(|x| back[x]).collect())
            .collect();
        Ok((make_sring(&ug, classes)?, embed))
    }

    /// `A_{G/L}`.
    pub fn quotient_sring(&self, l: &Subgroup) -> Result<SRing> {
        Ok(self.quotient_with_map(l)?.0)
    }

    pub fn quotient_with_map(&self, l: &Subgroup) -> Result<(SRing, Quotient)> {
        if !self.is_asubgroup(l) {
            return Err(Error::NotAnASubgroup(format!("{l:?}")));
        }
        let q = quotient_group(&self.0.group, l);
        if l.is_trivial() {
            return Ok((self.clone(), q));
        }
        let mut classes: Vec<Vec<usize>> =
            self.0.classes.iter().map(|c| q.project_set(c)).collect();
        classes.sort();
        classes.dedup();
        let ring = make_sring(q.group(), classes)?;
        Ok((ring, q))
    }

    /// Common value of `|X cap Hx|` over `x in X`.
    pub fn lambda(&self, i: usize, h: &Subgroup) -> Result<usize> {
        let g = &self.0.group;
        let x = &self.0.classes[i];
        let mut member = vec![false; g.order()];
        for &y in x {
            member[y] = true;
        }
        let mut value = None;
        for &y in x {
            let cnt = h.elements().iter().filter(|&&k| member[g.add(y, k)]).count();
            match value {
                None => value = Some(cnt),
                Some(v) if v != cnt => return Err(Error::InconsistentLambda(i)),
                _ => {}
            }
        }
        value.ok_or(Error::EmptySet)
    }

    /// Subgroup generated by the radicals of classes containing an element of
    /// maximal order.
    pub fn sring_radical(&self) -> Subgroup {
        let g = &self.0.group;
        let e = g.exponent();
        let mut gens = Vec::new();
        for c in &self.0.classes {
            if c.iter().any(|&x| g.order_of_index(x) == e) {
                let r = radical_of_set(g, c).expect("classes are nonempty");
                gens.extend_from_slice(r.generators());
            }
        }
        Subgroup::generated(g, &gens)
    }

    /// `rad(A)` over `C3 x C3^k`, k >= 2.
    pub fn sring_radical_p3k(&self) -> Result<Subgroup> {
        let inv = self.0.group.invariants();
        let ok = inv.len() == 2
            && inv[0] == 3
            && crate::arith::prime_power(inv[1] as u64).is_some_and(|(p, k)| p == 3 && k >= 2);
        if !ok {
            return Err(Error::WrongShape(format!(
                "{} is not C3 x C3^k with k >= 2",
                self.0.group
            )));
        }
        Ok(self.sring_radical())
    }

    /// Both factors of the internal direct decomposition `G = H x P` are A-subgroups.
    pub fn is_dense(&self, h: &Subgroup, p: &Subgroup) -> Result<bool> {
        if !h.is_complement_of(p) {
            return Err(Error::NotADirectDecomposition);
        }
        Ok(self.is_asubgroup(h) && self.is_asubgroup(p))
    }

    /// Image under a permutation of the group (an automorphism, an
    /// isomorphism onto `target`, or any bijection for relabeling).
    pub fn relabel(&self, target: &AbelianGroup, map: &[usize]) -> SRing {
        let classes = canonicalize_classes(
            self.0
                .classes
                .iter()
                .map(|c| c.iter().map(|&x| map[x]).collect())
                .collect(),
        );
        SRing::from_valid(target.clone(), classes)
    }

    pub fn apply_automorphism(&self, sigma: &Perm) -> SRing {
        self.relabel(&self.0.group, sigma.images().iter().map(|&x| x as usize).collect::<Vec<_>>().as_slice())
    }

    pub fn to_json(&self) -> SRingJson {
        SRingJson {
            group: GroupJson {
                factors: self.0.group.factors().to_vec(),
            },
            classes: self.0.classes.clone(),
        }
    }
}

/// `rad(X) = {g : gX = X}`.
pub fn radical_of_set(g: &AbelianGroup, set: &[usize]) -> Result<Subgroup> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut member = vec![false; g.order()];
    for &x in set {
        member[x] = true;
    }
    let x0 = set[0];
    let elems: Vec<usize> = set
        .iter()
        .map(|&x| g.sub(x, x0))
        .filter(|&d| set.iter().all(|&x| member[g.add(x, d)]))
        .collect();
    Subgroup::from_elements(g, &elems)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupJson {
    pub factors: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SRingJson {
    pub group: GroupJson,
    pub classes: Vec<Vec<usize>>,
}

impl SRingJson {
    /// Validates; non-canonical class order is accepted with a warning.
    pub fn into_sring(self) -> Result<SRing> {
        let g = AbelianGroup::new(&self.group.factors)?;
        if !is_canonical(&self.classes) {
            log::warn!("classes not in canonical order; re-canonicalizing");
        }
        make_sring(&g, self.classes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_group, subgroup_generated};

    fn singletons(g: &AbelianGroup) -> SRing {
        make_sring(g, (0..g.order()).map(|x| vec![x]).collect()).unwrap()
    }

    fn trivial(g: &AbelianGroup) -> SRing {
        let mut cl = vec![vec![0]];
        if g.order() > 1 {
            cl.push((1..g.order()).collect());
        }
        make_sring(g, cl).unwrap()
    }

    #[test]
    fn make_sring_examples() {
        let c4 = make_group(&[4]).unwrap();
        assert_eq!(singletons(&c4).rank(), 4);
        assert_eq!(trivial(&c4).rank(), 2);
        assert!(matches!(
            make_sring(&c4, vec![vec![0], vec![1, 2], vec![3]]),
            Err(Error::NotInverseClosed(_))
        ));
        assert_eq!(
            make_sring(&c4, vec![vec![0, 1], vec![2, 3]]),
            Err(Error::IdentityNotSingleton)
        );
        assert!(matches!(
            make_sring(&c4, vec![vec![0], vec![1, 3]]),
            Err(Error::NotAPartition(_))
        ));
        let c5 = make_group(&[5]).unwrap();
        assert!(matches!(
            make_sring(&c5, vec![vec![0], vec![1, 4], vec![2], vec![3]]),
            Err(Error::ModuleClosure { .. })
        ));
        // inverse-closed but not closed under products
        let c6 = make_group(&[6]).unwrap();
        assert!(matches!(
            make_sring(&c6, vec![vec![0], vec![1, 5], vec![2, 3, 4]]),
            Err(Error::ModuleClosure { .. })
        ));
    }

    #[test]
    fn structure_constant_examples() {
        let g = make_group(&[4, 2]).unwrap();
        let zg = singletons(&g);
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    let want = (g.add(zg.class(i)[0], zg.class(j)[0]) == zg.class(k)[0]) as u32;
                    assert_eq!(zg.structure_constant(i, j, k), want);
                }
            }
        }
        let t = trivial(&g);
        assert_eq!(t.structure_constant(1, 1, 1), 6);
        assert_eq!(t.structure_constant(1, 1, 0), 7);
    }

    #[test]
    fn a_subgroup_examples() {
        let g = make_group(&[4, 2]).unwrap();
        assert_eq!(singletons(&g).a_subgroups().unwrap().len(), 8);
        assert_eq!(trivial(&g).a_subgroups().unwrap().len(), 2);
        let t = trivial(&g);
        assert!(t.least_asubgroup_containing(&[3]).is_whole());
        assert!(t.least_asubgroup_containing(&[0]).is_trivial());
    }

    #[test]
    fn radical_examples() {
        let g = make_group(&[4, 2]).unwrap();
        assert!(radical_of_set(&g, &[0]).unwrap().is_trivial());
        let sharp: Vec<usize> = (1..8).collect();
        assert!(radical_of_set(&g, &sharp).unwrap().is_trivial());
        let l = subgroup_generated(&g, &[g.index_of(&[2, 0])]);
        let h = g.index_of(&[1, 1]);
        let coset: Vec<usize> = l.elements().iter().map(|&x| g.add(x, h)).collect();
        assert_eq!(radical_of_set(&g, &coset).unwrap(), l);
        assert_eq!(radical_of_set(&g, &[]), Err(Error::EmptySet));
    }

    #[test]
    fn rational_conjugate_examples() {
        let c5 = make_group(&[5]).unwrap();
        let a = make_sring(&c5, vec![vec![0], vec![1, 4], vec![2, 3]]).unwrap();
        assert_eq!(a.rational_conjugate(1, 2).unwrap(), 2);
        assert_eq!(a.rational_conjugate(1, 6).unwrap(), 1);
        assert_eq!(a.rational_conjugate(1, -1).unwrap(), 1);
        assert_eq!(a.rational_conjugate(1, 5), Err(Error::InvalidMultiplier(5)));
    }

    #[test]
    fn restrict_and_quotient() {
        let g = make_group(&[4, 2]).unwrap();
        let t = trivial(&g);
        assert_eq!(t.restrict(&Subgroup::whole(&g)).unwrap(), t);
        let r = t.restrict(&Subgroup::trivial(&g)).unwrap();
        assert_eq!(r.rank(), 1);
        let zg = singletons(&g);
        assert_eq!(zg.quotient_sring(&Subgroup::trivial(&g)).unwrap(), zg);
        assert_eq!(zg.quotient_sring(&Subgroup::whole(&g)).unwrap().rank(), 1);
        let a0 = subgroup_generated(&g, &[g.index_of(&[2, 0])]);
        assert!(t.restrict(&a0).is_err());
        assert_eq!(zg.quotient_sring(&a0).unwrap().rank(), 4);
    }

    #[test]
    fn lambda_examples() {
        let g = make_group(&[2, 3]).unwrap();
        let h = subgroup_generated(&g, &[g.index_of(&[1, 0])]);
        let t = make_sring(
            &g,
            vec![vec![0], vec![g.index_of(&[1, 0])], vec![g.index_of(&[0, 1]), g.index_of(&[0, 2])], vec![g.index_of(&[1, 1]), g.index_of(&[1, 2])]],
        )
        .unwrap();
        let xh = t.class_of(g.index_of(&[1, 0]));
        assert_eq!(t.lambda(xh, &h).unwrap(), 1);
        let xp = t.class_of(g.index_of(&[1, 1]));
        assert_eq!(t.lambda(xp, &h).unwrap(), 1);
    }

    #[test]
    fn radical_p3k_shape() {
        let g = make_group(&[3, 9]).unwrap();
        assert!(singletons(&g).sring_radical_p3k().unwrap().is_trivial());
        assert!(trivial(&g).sring_radical_p3k().unwrap().is_trivial());
        let c9 = make_group(&[9]).unwrap();
        assert!(matches!(singletons(&c9).sring_radical_p3k(), Err(Error::WrongShape(_))));
    }

    #[test]
    fn density() {
        let g = make_group(&[4, 6]).unwrap();
        let h = crate::group::sylow_subgroup(&g, 2);
        let p = crate::group::sylow_subgroup(&g, 3);
        assert!(singletons(&g).is_dense(&h, &p).unwrap());
        assert!(!trivial(&g).is_dense(&h, &p).unwrap());
        assert_eq!(
            trivial(&g).is_dense(&h, &h),
            Err(Error::NotADirectDecomposition)
        );
    }

    #[test]
    fn json_roundtrip_recanonicalizes() {
        let j = SRingJson {
            group: GroupJson { factors: vec![4] },
            classes: vec![vec![3, 1], vec![0], vec![2]],
        };
        let a = j.into_sring().unwrap();
        assert_eq!(a.classes(), &[vec![0], vec![1, 3], vec![2]]);
        let s = serde_json::to_string(&a.to_json()).unwrap();
        assert_eq!(s, r#"{"group":{"factors":[4]},"classes":[[0],[1,3],[2]]}"#);
    }
}
