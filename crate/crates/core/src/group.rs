//! Finite abelian groups given as products of cyclic factors.
//!
//! Elements are addressed by a mixed-radix index over the user-given factor
//! list (last factor varies fastest), so the generator of the i-th factor is a
//! unit vector. The group operation is written additively internally; in the
//! multiplicative language of S-rings `xy` is `add(x, y)` and `x^{-1}` is
//! `neg(x)`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::arith::{factorize, gcd, lcm};
use crate::error::{Error, Result};

/// Largest group order for which subgroup lattices are computed.
pub const DEFAULT_MAX_SUBGROUP_ORDER: usize = 256;
const MAX_ELEMENTS: usize = 1 << 24;
const TABLE_LIMIT: usize = 2048;

#[derive(Clone)]
pub struct AbelianGroup(Arc<Inner>);

struct Inner {
    factors: Vec<u32>,
    invariants: Vec<u32>,
    order: usize,
    exponent: u32,
    strides: Vec<usize>,
    neg: OnceLock<Vec<u32>>,
    orders: OnceLock<Vec<u32>>,
    table: OnceLock<Vec<u32>>,
}

impl PartialEq for AbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.factors == other.0.factors
    }
}
impl Eq for AbelianGroup {}

impl std::hash::Hash for AbelianGroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.factors.hash(state)
    }
}

impl fmt::Debug for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbelianGroup{:?}", self.0.factors)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.factors.is_empty() {
            return write!(f, "C1");
        }
        let parts: Vec<String> = self.0.factors.iter().map(|n| format!("C{n}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Builds the group `C_{n_1} x ... x C_{n_k}`. The empty list is the trivial group.
pub fn make_group(factors: &[u32]) -> Result<AbelianGroup> {
    AbelianGroup::new(factors)
}

/// One representative per isomorphism class of abelian groups of order `n`.
pub fn abelian_groups_of_order(n: u64) -> Result<Vec<AbelianGroup>> {
    fn partitions(e: u32, max: u32) -> Vec<Vec<u32>> {
        if e == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for first in (1..=e.min(max)).rev() {
            for mut rest in partitions(e - first, first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut shapes: Vec<Vec<u32>> = vec![Vec::new()];
    for (p, e) in factorize(n) {
        let mut next = Vec::new();
        for shape in &shapes {
            for part in partitions(e, e) {
                let mut s = shape.clone();
                s.extend(part.iter().map(|&k| (p as u32).pow(k)));
                next.push(s);
            }
        }
        shapes = next;
    }
    if n == 1 {
        return Ok(vec![AbelianGroup::trivial()]);
    }
    shapes.iter().map(|s| AbelianGroup::new(s)).collect()
}

/// Invariant factors `n_1 | n_2 | ... | n_k` of a product of cyclic groups.
pub fn invariant_factors_of(factors: &[u32]) -> Vec<u32> {
    let mut by_prime: HashMap<u64, Vec<u32>> = HashMap::new();
    for &n in factors {
        for (p, e) in factorize(n as u64) {
            by_prime.entry(p).or_default().push(e);
        }
    }
    let depth = by_prime.values().map(|v| v.len()).max().unwrap_or(0);
    let mut out = vec![1u32; depth];
    for (p, mut exps) in by_prime {
        exps.sort_unstable_by(|a, b| b.cmp(a));
        for (i, e) in exps.into_iter().enumerate() {
            out[i] *= (p as u32).pow(e);
        }
    }
    out.reverse();
    out
}

impl AbelianGroup {
    pub fn new(factors: &[u32]) -> Result<Self> {
        if let Some(&bad) = factors.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidFactor(bad as u64));
        }
        let mut order: usize = 1;
        for &n in factors {
            order = order.checked_mul(n as usize).filter(|&o| o <= MAX_ELEMENTS).ok_or(
                Error::BoundExceeded {
                    what: "group order",
                    actual: usize::MAX,
                    limit: MAX_ELEMENTS,
                },
            )?;
        }
        let mut strides = vec![1usize; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1] as usize;
        }
        let exponent = factors.iter().fold(1u64, |acc, &n| lcm(acc, n as u64)) as u32;
        Ok(AbelianGroup(Arc::new(Inner {
            factors: factors.to_vec(),
            invariants: invariant_factors_of(factors),
            order,
            exponent,
            strides,
            neg: OnceLock::new(),
            orders: OnceLock::new(),
            table: OnceLock::new(),
        })))
    }

    pub fn trivial() -> Self {
        AbelianGroup::new(&[]).expect("trivial group")
    }

    pub fn cyclic(n: u32) -> Result<Self> {
        if n == 1 {
            Ok(Self::trivial())
        } else {
            Self::new(&[n])
        }
    }

    pub fn factors(&self) -> &[u32] {
        &self.0.factors
    }

    /// Canonical invariant-factor form, ascending with each term dividing the next.
    pub fn invariants(&self) -> &[u32] {
        &self.0.invariants
    }

    pub fn order(&self) -> usize {
        self.0.order
    }

    pub fn exponent(&self) -> u32 {
        self.0.exponent
    }

    pub fn is_isomorphic_to(&self, other: &AbelianGroup) -> bool {
        self.invariants() == other.invariants()
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Index of the generator of the i-th cyclic factor.
    pub fn unit(&self, i: usize) -> usize {
        self.0.strides[i]
    }

    pub fn units(&self) -> Vec<usize> {
        (0..self.0.factors.len()).map(|i| self.unit(i)).collect()
    }

    pub fn coords(&self, mut idx: usize) -> Vec<u32> {
        let f = &self.0.factors;
        let mut c = vec![0u32; f.len()];
        for i in (0..f.len()).rev() {
            c[i] = (idx % f[i] as usize) as u32;
            idx /= f[i] as usize;
        }
        c
    }

    /// Index of a coordinate vector; coordinates are reduced modulo the factors.
    pub fn index_of(&self, coords: &[i64]) -> usize {
        coords
            .iter()
            .zip(&self.0.factors)
            .zip(&self.0.strides)
            .map(|((&c, &n), &s)| c.rem_euclid(n as i64) as usize * s)
            .sum()
    }

    fn add_slow(&self, i: usize, j: usize) -> usize {
        let mut out = 0;
        for (k, &n) in self.0.factors.iter().enumerate() {
            let s = self.0.strides[k];
            let n = n as usize;
            let a = (i / s) % n;
            let b = (j / s) % n;
            out += ((a + b) % n) * s;
        }
        out
    }

    fn table(&self) -> Option<&[u32]> {
        let n = self.0.order;
        if n > TABLE_LIMIT {
            return None;
        }
        Some(self.0.table.get_or_init(|| {
            let mut t = vec![0u32; n * n];
            for i in 0..n {
                for j in 0..n {
                    t[i * n + j] = self.add_slow(i, j) as u32;
                }
            }
            t
        }))
    }

    /// The full Cayley table (row-major), for orders up to 2048.
    pub fn cayley_table(&self) -> Option<&[u32]> {
        self.table()
    }

    #[inline]
    pub fn add(&self, i: usize, j: usize) -> usize {
        match self.table() {
            Some(t) => t[i * self.0.order + j] as usize,
            None => self.add_slow(i, j),
        }
    }

    pub fn neg_table(&self) -> &[u32] {
        self.0.neg.get_or_init(|| {
            (0..self.0.order)
                .map(|i| {
                    let mut out = 0;
                    for (k, &n) in self.0.factors.iter().enumerate() {
                        let s = self.0.strides[k];
                        let n = n as usize;
                        let a = (i / s) % n;
                        out += ((n - a) % n) * s;
                    }
                    out as u32
                })
                .collect()
        })
    }

    #[inline]
    pub fn neg(&self, i: usize) -> usize {
        self.neg_table()[i] as usize
    }

    #[inline]
    pub fn sub(&self, i: usize, j: usize) -> usize {
        self.add(i, self.neg(j))
    }

    /// `m`-th power (additively `m * x`), any integer `m`.
    pub fn scale(&self, i: usize, m: i64) -> usize {
        let c = self.coords(i);
        let scaled: Vec<i64> = c
            .iter()
            .zip(&self.0.factors)
            .map(|(&x, &n)| ((x as i64 % n as i64) * m.rem_euclid(n as i64)) % n as i64)
            .collect();
        self.index_of(&scaled)
    }

    pub fn element_orders(&self) -> &[u32] {
        self.0.orders.get_or_init(|| {
            (0..self.0.order)
                .map(|i| {
                    self.coords(i)
                        .iter()
                        .zip(&self.0.factors)
                        .fold(1u64, |acc, (&x, &n)| {
                            lcm(acc, n as u64 / gcd(n as u64, x as u64))
                        }) as u32
                })
                .collect()
        })
    }

    #[inline]
    pub fn order_of_index(&self, i: usize) -> u32 {
        self.element_orders()[i]
    }

    pub fn element(&self, i: usize) -> GroupElement {
        GroupElement {
            group: self.clone(),
            coords: self.coords(i),
        }
    }

    pub fn element_from_coords(&self, coords: &[i64]) -> GroupElement {
        self.element(self.index_of(coords))
    }

    /// Pairing exponent `t(chi, x)`; the character value is `zeta^t` with
    /// `zeta` a primitive `exponent`-th root of unity.
    pub fn pairing_exponent(&self, chi: usize, x: usize) -> u32 {
        let e = self.0.exponent as u64;
        let a = self.coords(chi);
        let b = self.coords(x);
        let mut t = 0u64;
        for k in 0..a.len() {
            let n = self.0.factors[k] as u64;
            t = (t + a[k] as u64 * b[k] as u64 % n * (e / n)) % e;
        }
        t as u32
    }

    /// Direct product `self x other`; the index of `(g, h)` is `g * |other| + h`.
    pub fn product(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut f = self.factors().to_vec();
        f.extend_from_slice(other.factors());
        AbelianGroup::new(&f).expect("factors already validated")
    }
}

/// An element of an [`AbelianGroup`] as a residue vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    group: AbelianGroup,
    coords: Vec<u32>,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

impl GroupElement {
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn index(&self) -> usize {
        let c: Vec<i64> = self.coords.iter().map(|&x| x as i64).collect();
        self.group.index_of(&c)
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .zip(self.group.factors())
            .map(|((&a, &b), &n)| (a + b) % n)
            .collect();
        Ok(GroupElement {
            group: self.group.clone(),
            coords,
        })
    }

    pub fn inv(&self) -> GroupElement {
        let coords = self
            .coords
            .iter()
            .zip(self.group.factors())
            .map(|(&a, &n)| (n - a) % n)
            .collect();
        GroupElement {
            group: self.group.clone(),
            coords,
        }
    }

    pub fn order_of(&self) -> u32 {
        self.coords
            .iter()
            .zip(self.group.factors())
            .fold(1u64, |acc, (&x, &n)| lcm(acc, n as u64 / gcd(n as u64, x as u64))) as u32
    }

    /// `g^m` by repeated squaring of the additive form.
    pub fn power(&self, m: i64) -> GroupElement {
        let (base, mut e) = if m < 0 {
            (self.inv(), m.unsigned_abs())
        } else {
            (self.clone(), m as u64)
        };
        let mut acc = self.group.element(0);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq).expect("same group");
            }
            sq = sq.mul(&sq).expect("same group");
            e >>= 1;
        }
        acc
    }
}

/// A character of `G`, identified with an element of `G` through the fixed pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character(pub GroupElement);

impl Character {
    pub fn exponent_at(&self, x: &GroupElement) -> Result<u32> {
        if self.0.group() != x.group() {
            return Err(Error::GroupMismatch);
        }
        Ok(self.0.group().pairing_exponent(self.0.index(), x.index()))
    }
}

/// A subgroup of an abelian group, stored by its sorted element set together
/// with an invariant-factor basis.
#[derive(Clone)]
pub struct Subgroup {
    parent: AbelianGroup,
    elements: Vec<usize>,
    member: Vec<bool>,
    invariants: Vec<u32>,
    basis: Vec<usize>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.parent == other.parent && self.elements == other.elements
    }
}
impl Eq for Subgroup {}

impl std::hash::Hash for Subgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.elements.hash(state)
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.elements.len(), &self.elements).cmp(&(other.elements.len(), &other.elements))
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", self.elements)
    }
}

impl Subgroup {
    fn from_closed(parent: &AbelianGroup, mut elements: Vec<usize>) -> Subgroup {
        elements.sort_unstable();
        let mut member = vec![false; parent.order()];
        for &x in &elements {
            member[x] = true;
        }
        let orders: Vec<u32> = elements.iter().map(|&x| parent.order_of_index(x)).collect();
        let pos: HashMap<usize, usize> =
            elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let add = |a: usize, b: usize| pos[&parent.add(elements[a], elements[b])];
        let (invariants, local_basis) = decompose(elements.len(), &add, &orders);
        let basis = local_basis.into_iter().map(|i| elements[i]).collect();
        Subgroup {
            parent: parent.clone(),
            elements,
            member,
            invariants,
            basis,
        }
    }

    /// `<S>` for a set of element indices.
    pub fn generated(parent: &AbelianGroup, gens: &[usize]) -> Subgroup {
        let n = parent.order();
        let mut member = vec![false; n];
        member[0] = true;
        let mut elems = vec![0usize];
        let mut head = 0;
        let gens: Vec<usize> = gens.iter().copied().filter(|&g| g != 0).collect();
        while head < elems.len() {
            let x = elems[head];
            head += 1;
            for &g in &gens {
                let y = parent.add(x, g);
                if !member[y] {
                    member[y] = true;
                    elems.push(y);
                }
            }
        }
        Subgroup::from_closed(parent, elems)
    }

    /// Validates closure of an explicit element set.
    pub fn from_elements(parent: &AbelianGroup, elements: &[usize]) -> Result<Subgroup> {
        let mut member = vec![false; parent.order()];
        for &x in elements {
            if x >= parent.order() {
                return Err(Error::Precondition(format!("element {x} out of range")));
            }
            member[x] = true;
        }
        if !member[0] {
            return Err(Error::Precondition("subgroup must contain the identity".into()));
        }
        for &x in elements {
            for &y in elements {
                if !member[parent.sub(x, y)] {
                    return Err(Error::Precondition("element set is not closed".into()));
                }
            }
        }
        let mut e = elements.to_vec();
        e.sort_unstable();
        e.dedup();
        Ok(Subgroup::from_closed(parent, e))
    }

    pub fn trivial(parent: &AbelianGroup) -> Subgroup {
        Subgroup::from_closed(parent, vec![0])
    }

    pub fn whole(parent: &AbelianGroup) -> Subgroup {
        Subgroup::from_closed(parent, (0..parent.order()).collect())
    }

    pub fn parent(&self) -> &AbelianGroup {
        &self.parent
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.member[x]
    }

    pub fn membership(&self) -> &[bool] {
        &self.member
    }

    /// Minimal generating list (an invariant-factor basis).
    pub fn generators(&self) -> &[usize] {
        &self.basis
    }

    pub fn invariants(&self) -> &[u32] {
        &self.invariants
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.elements.len() == self.parent.order()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn contains_set(&self, set: &[usize]) -> bool {
        set.iter().all(|&x| self.contains(x))
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let e: Vec<usize> = self
            .elements
            .iter()
            .copied()
            .filter(|&x| other.contains(x))
            .collect();
        Subgroup::from_closed(&self.parent, e)
    }

    /// The product `HK`.
    pub fn join(&self, other: &Subgroup) -> Subgroup {
        let mut gens = self.basis.clone();
        gens.extend_from_slice(&other.basis);
        Subgroup::generated(&self.parent, &gens)
    }

    /// Whether the parent is the internal direct product of `self` and `other`.
    pub fn is_complement_of(&self, other: &Subgroup) -> bool {
        self.order() * other.order() == self.parent.order()
            && self.elements.iter().filter(|&&x| other.contains(x)).count() == 1
    }

    /// The cyclic group structure of this subgroup as a standalone group and
    /// the embedding (abstract index -> parent index). The whole group maps to
    /// its parent via the identity.
    pub fn abstract_group(&self) -> (AbelianGroup, Vec<usize>) {
        if self.is_whole() {
            return (self.parent.clone(), (0..self.parent.order()).collect());
        }
        let g = AbelianGroup::new(&self.invariants).expect("invariant factors are valid");
        let embed = (0..g.order())
            .map(|i| {
                let c = g.coords(i);
                c.iter().zip(&self.basis).fold(0usize, |acc, (&k, &b)| {
                    self.parent.add(acc, self.parent.scale(b, k as i64))
                })
            })
            .collect();
        (g, embed)
    }

    /// Characteristic in the parent: fixed setwise by every automorphism.
    pub fn is_characteristic(&self) -> Result<bool> {
        let aut = crate::aut::automorphism_group(&self.parent)?;
        Ok(aut
            .elements()?
            .iter()
            .all(|s| self.elements.iter().all(|&x| self.contains(s.apply(x)))))
    }
}

/// A section `U/L` with `L <= U`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Section {
    pub upper: Subgroup,
    pub lower: Subgroup,
}

impl Section {
    pub fn new(upper: Subgroup, lower: Subgroup) -> Result<Section> {
        if !lower.is_subgroup_of(&upper) {
            return Err(Error::Precondition("section needs L <= U".into()));
        }
        Ok(Section { upper, lower })
    }

    /// `|U/L|`.
    pub fn order(&self) -> usize {
        self.upper.order() / self.lower.order()
    }

    /// `{e} < L` and `U < G`.
    pub fn is_nontrivial(&self) -> bool {
        !self.lower.is_trivial() && !self.upper.is_whole()
    }
}

/// `<S>`.
pub fn subgroup_generated(parent: &AbelianGroup, set: &[usize]) -> Subgroup {
    Subgroup::generated(parent, set)
}

/// `{x : x^m = e}`.
pub fn omega_subgroup(parent: &AbelianGroup, m: u32) -> Subgroup {
    let elems = (0..parent.order())
        .filter(|&x| m.is_multiple_of(parent.order_of_index(x)))
        .collect();
    Subgroup::from_closed(parent, elems)
}

/// Elements of order coprime to `p` (the Hall p'-part).
pub fn hall_complement(parent: &AbelianGroup, p: u32) -> Subgroup {
    let elems = (0..parent.order())
        .filter(|&x| !parent.order_of_index(x).is_multiple_of(p))
        .collect();
    Subgroup::from_closed(parent, elems)
}

/// Elements of p-power order (the Sylow p-subgroup).
pub fn sylow_subgroup(parent: &AbelianGroup, p: u32) -> Subgroup {
    let elems = (0..parent.order())
        .filter(|&x| {
            let mut o = parent.order_of_index(x);
            while o.is_multiple_of(p) {
                o /= p;
            }
            o == 1
        })
        .collect();
    Subgroup::from_closed(parent, elems)
}

/// `H^perp = {chi : t(chi, h) = 0 for all h in H}` inside the dual group,
/// identified with the parent group.
pub fn orthogonal_complement(h: &Subgroup) -> Subgroup {
    let g = h.parent();
    let elems = (0..g.order())
        .filter(|&chi| h.generators().iter().all(|&x| g.pairing_exponent(chi, x) == 0))
        .collect();
    Subgroup::from_closed(g, elems)
}

type SubgroupCache = Mutex<HashMap<Vec<u32>, Arc<Vec<Subgroup>>>>;

fn subgroup_cache() -> &'static SubgroupCache {
    static CACHE: OnceLock<SubgroupCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// All subgroups, sorted by (order, element set); cached per factor list.
pub fn all_subgroups(parent: &AbelianGroup) -> Result<Arc<Vec<Subgroup>>> {
    all_subgroups_bounded(parent, DEFAULT_MAX_SUBGROUP_ORDER)
}

pub fn all_subgroups_bounded(parent: &AbelianGroup, max_order: usize) -> Result<Arc<Vec<Subgroup>>> {
    if parent.order() > max_order {
        return Err(Error::BoundExceeded {
            what: "group order for subgroup scan",
            actual: parent.order(),
            limit: max_order,
        });
    }
    if let Some(hit) = subgroup_cache().lock().unwrap().get(parent.factors()) {
        return Ok(hit.clone());
    }
    let n = parent.order();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue: Vec<Vec<usize>> = vec![vec![0]];
    seen.insert(vec![0]);
    let mut head = 0;
    while head < queue.len() {
        let cur = queue[head].clone();
        head += 1;
        let mut member = vec![false; n];
        for &x in &cur {
            member[x] = true;
        }
        for g in 0..n {
            if member[g] {
                continue;
            }
            // <cur, g> = union of cosets cur + k g
            let mut elems = cur.clone();
            let mut m = member.clone();
            let mut step = g;
            while !m[step] {
                for &x in &cur {
                    let y = parent.add(x, step);
                    m[y] = true;
                    elems.push(y);
                }
                step = parent.add(step, g);
            }
            elems.sort_unstable();
            if seen.insert(elems.clone()) {
                queue.push(elems);
            }
        }
    }
    let mut subs: Vec<Subgroup> = queue
        .into_iter()
        .map(|e| Subgroup::from_closed(parent, e))
        .collect();
    subs.sort();
    let subs = Arc::new(subs);
    subgroup_cache()
        .lock()
        .unwrap()
        .insert(parent.factors().to_vec(), subs.clone());
    Ok(subs)
}

/// The quotient `G/L` with a fixed coset indexing.
#[derive(Clone, Debug)]
pub struct Quotient {
    parent: AbelianGroup,
    kernel: Subgroup,
    group: AbelianGroup,
    proj: Vec<usize>,
    lift: Vec<usize>,
}

impl Quotient {
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn parent(&self) -> &AbelianGroup {
        &self.parent
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    /// The canonical epimorphism, parent index -> quotient index.
    pub fn projection(&self) -> &[usize] {
        &self.proj
    }

    #[inline]
    pub fn project(&self, x: usize) -> usize {
        self.proj[x]
    }

    /// Least-index coset representative for each quotient element.
    pub fn lift(&self, q: usize) -> usize {
        self.lift[q]
    }

    pub fn project_set(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&x| self.proj[x]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Full preimage of a set of quotient elements.
    pub fn preimage(&self, set: &[usize]) -> Vec<usize> {
        let mut want = vec![false; self.group.order()];
        for &q in set {
            want[q] = true;
        }
        (0..self.parent.order()).filter(|&x| want[self.proj[x]]).collect()
    }

    pub fn push_subgroup(&self, h: &Subgroup) -> Subgroup {
        let gens: Vec<usize> = h.generators().iter().map(|&x| self.proj[x]).collect();
        Subgroup::generated(&self.group, &gens)
    }

    pub fn pull_subgroup(&self, h: &Subgroup) -> Subgroup {
        Subgroup::from_closed(&self.parent, self.preimage(h.elements()))
    }
}

/// `G/L` with the canonical epimorphism.
pub fn quotient_group(parent: &AbelianGroup, kernel: &Subgroup) -> Quotient {
    let n = parent.order();
    if kernel.is_trivial() {
        return Quotient {
            parent: parent.clone(),
            kernel: kernel.clone(),
            group: parent.clone(),
            proj: (0..n).collect(),
            lift: (0..n).collect(),
        };
    }
    let mut coset = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for x in 0..n {
        if coset[x] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(x);
        for &l in kernel.elements() {
            coset[parent.add(x, l)] = c;
        }
    }
    let m = reps.len();
    let add = |a: usize, b: usize| coset[parent.add(reps[a], reps[b])];
    let orders: Vec<u32> = (0..m)
        .map(|c| {
            let mut k = 1;
            let mut acc = reps[c];
            while !kernel.contains(acc) {
                acc = parent.add(acc, reps[c]);
                k += 1;
            }
            k
        })
        .collect();
    let (invariants, basis) = decompose(m, &add, &orders);
    let group = AbelianGroup::new(&invariants).expect("valid invariants");
    let mut q_of_coset = vec![0usize; m];
    for q in 0..group.order() {
        let c = group.coords(q);
        let mut acc = 0usize;
        for (k, &b) in c.iter().zip(&basis) {
            for _ in 0..*k {
                acc = add(acc, b);
            }
        }
        q_of_coset[acc] = q;
    }
    let proj: Vec<usize> = (0..n).map(|x| q_of_coset[coset[x]]).collect();
    let mut lift = vec![usize::MAX; group.order()];
    for x in (0..n).rev() {
        lift[proj[x]] = x;
    }
    Quotient {
        parent: parent.clone(),
        kernel: kernel.clone(),
        group,
        proj,
        lift,
    }
}

/// Invariant factors (ascending) and a matching basis of an abstract finite
/// abelian group on `0..n` with identity `0`.
pub(crate) fn decompose(
    n: usize,
    add: &dyn Fn(usize, usize) -> usize,
    orders: &[u32],
) -> (Vec<u32>, Vec<usize>) {
    if n == 1 {
        return (Vec::new(), Vec::new());
    }
    let mut ascending = Vec::new();
    let mut by_prime: Vec<(u64, Vec<u32>)> = Vec::new();
    for (p, _) in factorize(n as u64) {
        // c_j = number of cyclic p-factors of order >= p^j
        let mut prev = 1usize;
        let mut j = 1u32;
        let mut counts = Vec::new();
        loop {
            let pj = p.pow(j);
            let cnt = orders
                .iter()
                .filter(|&&o| {
                    let o = o as u64;
                    pj % o == 0
                })
                .count();
            if cnt == prev {
                break;
            }
            let mut ratio = cnt / prev;
            let mut c = 0;
            while ratio > 1 {
                ratio /= p as usize;
                c += 1;
            }
            counts.push(c);
            prev = cnt;
            j += 1;
        }
        let mut exps = Vec::new();
        for (idx, &c) in counts.iter().enumerate() {
            let next = counts.get(idx + 1).copied().unwrap_or(0);
            for _ in 0..(c - next) {
                exps.push(idx as u32 + 1);
            }
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        by_prime.push((p, exps));
    }
    let depth = by_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    let mut desc = vec![1u32; depth];
    for (p, exps) in &by_prime {
        for (i, &e) in exps.iter().enumerate() {
            desc[i] *= (*p as u32).pow(e);
        }
    }
    let mut span = vec![false; n];
    span[0] = true;
    let mut chosen = Vec::new();
    let ok = choose_basis(n, add, orders, &desc, &mut span, &mut chosen);
    assert!(ok, "finite abelian group always has an invariant-factor basis");
    ascending.extend(desc.iter().rev().copied());
    chosen.reverse();
    (ascending, chosen)
}

fn choose_basis(
    n: usize,
    add: &dyn Fn(usize, usize) -> usize,
    orders: &[u32],
    desc: &[u32],
    span: &mut Vec<bool>,
    chosen: &mut Vec<usize>,
) -> bool {
    let k = chosen.len();
    if k == desc.len() {
        return span.iter().all(|&b| b);
    }
    let d = desc[k];
    let current: Vec<usize> = (0..n).filter(|&x| span[x]).collect();
    for g in 0..n {
        if orders[g] != d || span[g] {
            continue;
        }
        let mut m = g;
        let mut disjoint = true;
        for _ in 1..d {
            if span[m] {
                disjoint = false;
                break;
            }
            m = add(m, g);
        }
        if !disjoint {
            continue;
        }
        let saved = span.clone();
        let mut step = g;
        for _ in 1..d {
            for &s in &current {
                span[add(s, step)] = true;
            }
            step = add(step, g);
        }
        chosen.push(g);
        if choose_basis(n, add, orders, desc, span, chosen) {
            return true;
        }
        chosen.pop();
        *span = saved;
    }
    false
}
